"""Dense linear programming in standard form, plus weighted basis pursuit.

The solver is a deterministic two-phase tableau simplex. Artificial columns
are never materialized: phase one starts from the all-artificial basis and
both cost rows live inside one dense tableau that is updated with rank-1
BLAS pivots. Pricing is Dantzig (most negative reduced cost, lowest index on
ties) with an automatic switch to Bland's rule after a pivot budget, which
makes the method finite on degenerate problems while keeping the common case
fast. Redundant constraint rows are detected at the end of phase one — an
artificial variable that cannot be pivoted out at tolerance 1e-10 sits in a
rank-deficient row — and those rows are dropped before phase two.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.blas import dger

from .specialfn import ConvergenceError

__all__ = [
    "LinearProgram",
    "LpSolution",
    "InfeasibleError",
    "SolverError",
    "solve_lp",
    "basis_pursuit",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class InfeasibleError(RuntimeError):
    """The constraint set Mv = b, v >= 0 has no solution."""


class SolverError(RuntimeError):
    """The solver produced a point that fails its own certification checks."""


def _as_float_array(a, name, ndim):
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class LinearProgram:
    """Standard-form program: minimize objective @ v subject to
    constraints @ v = rhs and v >= 0 componentwise."""

    objective: np.ndarray
    constraints: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        c = _as_float_array(self.objective, "objective", 1)
        m_mat = _as_float_array(self.constraints, "constraints", 2)
        b = _as_float_array(self.rhs, "rhs", 1)
        if m_mat.shape != (b.shape[0], c.shape[0]):
            raise ValueError(
                f"constraints shape {m_mat.shape} inconsistent with "
                f"objective length {c.shape[0]} and rhs length {b.shape[0]}"
            )
        if m_mat.shape[0] < 1 or m_mat.shape[1] < 1:
            raise ValueError("program must have at least one row and one column")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", m_mat)
        object.__setattr__(self, "rhs", b)


@dataclass(frozen=True)
class LpSolution:
    """Outcome of `solve_lp`: status is one of "optimal", "infeasible",
    "unbounded"; point and value are None unless status is "optimal"."""

    status: str
    point: np.ndarray | None
    value: float | None
    iterations: int


def _pivot(tableau, row, col):
    """Eliminate `col` from every row except `row` via one rank-1 update."""
    new_row = tableau[row] / tableau[row, col]
    other = tableau[:, col].copy()
    other[row] = 0.0
    # tableau -= outer(other, new_row), done in place through the transpose,
    # which is Fortran-ordered as BLAS requires
    dger(-1.0, new_row, other, a=tableau.T, overwrite_a=1)
    tableau[row] = new_row
    tableau[:, col] = 0.0
    tableau[row, col] = 1.0


def _entering(cost_row, n_struct, bland, tol):
    """Index of the entering column, or -1 when all reduced costs are >= -tol."""
    reduced = cost_row[:n_struct]
    if bland:
        negative = np.flatnonzero(reduced < -tol)
        return int(negative[0]) if negative.size else -1
    j = int(np.argmin(reduced))
    return j if reduced[j] < -tol else -1


def _leaving(tableau, n_rows, col, basis, bland, pivot_tol):
    """Row index from the minimum-ratio test, or -1 when the column is
    nonpositive (the objective is unbounded along it)."""
    column = tableau[:n_rows, col]
    rhs = tableau[:n_rows, -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(column > pivot_tol, rhs / column, np.inf)
    best = ratios.min()
    if not np.isfinite(best):
        return -1
    if bland:
        ties = np.flatnonzero(ratios == best)
        return int(ties[np.argmin(basis[ties])])
    return int(np.argmin(ratios))


def solve_lp(program, *, pivot_tol=1e-10, cost_tol=1e-9, feas_tol=1e-7,
             max_iter=100_000, bland_after=20_000):
    """Solve a standard-form `LinearProgram` with two-phase simplex.

    Returns an `LpSolution`. An optimal point is a vertex: it satisfies the
    equalities to roundoff and has at most rank(constraints) nonzeros. Raises
    ConvergenceError if the pivot budget is exhausted.
    """
    c = program.objective
    m_mat = program.constraints
    b = program.rhs
    m, d = m_mat.shape

    # orient every row so its right-hand side is nonnegative
    flip = np.where(b < 0.0, -1.0, 1.0)
    tableau = np.zeros((m + 2, d + 1))
    tableau[:m, :d] = m_mat * flip[:, None]
    tableau[:m, -1] = b * flip
    tableau[m, :d] = c
    tableau[m + 1, :d] = -tableau[:m, :d].sum(axis=0)
    tableau[m + 1, -1] = -tableau[:m, -1].sum()
    basis = np.arange(d, d + m)

    iterations = 0

    def run_phase(cost_index, n_rows):
        nonlocal iterations
        while True:
            if iterations >= max_iter:
                raise ConvergenceError(
                    f"simplex exceeded the pivot budget of {max_iter}"
                )
            bland = iterations >= bland_after
            col = _entering(tableau[cost_index], d, bland, cost_tol)
            if col < 0:
                return OPTIMAL
            row = _leaving(tableau, n_rows, col, basis, bland, pivot_tol)
            if row < 0:
                return UNBOUNDED
            _pivot(tableau, row, col)
            basis[row] = col
            iterations += 1

    status = run_phase(m + 1, m)
    if status == UNBOUNDED or -tableau[m + 1, -1] > feas_tol:
        # phase one minimizes a sum of nonnegative artificials, so a strictly
        # positive optimum (or a numerically unbounded ray) certifies that the
        # equalities admit no nonnegative solution
        return LpSolution(INFEASIBLE, None, None, iterations)

    # pivot surviving artificials out of the basis; rows where no structural
    # coefficient exceeds 1e-10 are linearly dependent on the others and are
    # removed before phase two
    redundant = []
    for r in range(m):
        if basis[r] >= d:
            structural = np.abs(tableau[r, :d])
            j = int(np.argmax(structural))
            if structural[j] > 1e-10:
                _pivot(tableau, r, j)
                basis[r] = j
            else:
                redundant.append(r)
    if redundant:
        tableau = np.ascontiguousarray(np.delete(tableau, redundant, axis=0))
        basis = np.delete(basis, redundant)
        m -= len(redundant)

    status = run_phase(m, m)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, None, None, iterations)

    point = np.zeros(d)
    in_basis = basis < d
    point[basis[in_basis]] = tableau[:m, -1][in_basis]
    return LpSolution(OPTIMAL, point, float(c @ point), iterations)


def basis_pursuit(matrix, target, weights=None, *, residual_tol=1e-8):
    """Minimize sum_i weights_i * |z_i| subject to matrix @ z = target.

    The signed variable is split as z = u - v with u, v >= 0, giving the
    standard-form program min [w; w] @ [u; v] over [matrix, -matrix] — at any
    vertex u and v have disjoint supports, so the objective equals the
    weighted l1 norm. Returns the minimizing z. Raises InfeasibleError when
    target is outside the column span of matrix, and SolverError if the
    returned point fails the residual certificate
    max|matrix @ z - target| <= residual_tol * (1 + max|target|).
    """
    a_mat = _as_float_array(matrix, "matrix", 2)
    y = _as_float_array(target, "target", 1)
    m, n = a_mat.shape
    if y.shape[0] != m:
        raise ValueError(f"target length {y.shape[0]} != row count {m}")
    if weights is None:
        w = np.ones(n)
    else:
        w = _as_float_array(weights, "weights", 1)
        if w.shape[0] != n:
            raise ValueError(f"weights length {w.shape[0]} != column count {n}")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")

    program = LinearProgram(
        objective=np.concatenate([w, w]),
        constraints=np.hstack([a_mat, -a_mat]),
        rhs=y,
    )
    solution = solve_lp(program)
    if solution.status == INFEASIBLE:
        raise InfeasibleError(
            "target is not in the column span of the constraint matrix"
        )
    if solution.status != OPTIMAL:
        raise SolverError(f"unexpected solver status {solution.status!r}")
    z = solution.point[:n] - solution.point[n:]
    residual = np.max(np.abs(a_mat @ z - y)) if m else 0.0
    bound = residual_tol * (1.0 + (np.max(np.abs(y)) if m else 0.0))
    if residual > bound:
        raise SolverError(
            f"residual {residual:.3e} exceeds certificate bound {bound:.3e}"
        )
    return z
