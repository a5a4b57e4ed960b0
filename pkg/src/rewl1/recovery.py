"""Sparse recovery from exact linear measurements y = A x.

Two solvers are exposed: plain l1 minimization, and a two-step scheme that
first solves the unweighted problem, reads off the k largest entries of the
estimate as an approximate support L, and then re-solves with weight 1 on L
and weight omega > 1 elsewhere, penalizing mass outside the approximate
support. `overlap_report` quantifies how much of the true support the first
pass finds, together with the deterministic worst-case lower bound
|K ∩ L| >= k - W(x, ||x - x_hat||_1), where W(x, t) counts how many of the
smallest nonzero entries of x fit inside an l1 budget t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lp import basis_pursuit

__all__ = [
    "SparseSignal",
    "RecoveryOutcome",
    "OverlapReport",
    "DISTRIBUTION_TAGS",
    "k_support",
    "l1_minimize",
    "two_step_recover",
    "w_of",
    "overlap_report",
]

DISTRIBUTION_TAGS = (
    "gaussian",
    "uniform",
    "rayleigh",
    "chi4",
    "chi6",
    "bpsk",
    "custom",
)


@dataclass(frozen=True)
class SparseSignal:
    """An exactly k-sparse vector with its support set and distribution tag."""

    values: np.ndarray
    sparsity_k: int
    support: np.ndarray
    distribution_tag: str = "custom"

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("values must be a 1-d vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("values contains non-finite entries")
        support = np.asarray(self.support, dtype=np.intp)
        support = np.sort(support)
        nonzero = np.flatnonzero(values)
        if support.shape[0] != self.sparsity_k:
            raise ValueError(
                f"support size {support.shape[0]} != sparsity_k {self.sparsity_k}"
            )
        if not np.array_equal(nonzero, support):
            raise ValueError("support must be exactly the set of nonzero indices")
        if self.distribution_tag not in DISTRIBUTION_TAGS:
            raise ValueError(
                f"unknown distribution_tag {self.distribution_tag!r}; "
                f"expected one of {DISTRIBUTION_TAGS}"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "support", support)

    @classmethod
    def from_values(cls, values, distribution_tag="custom"):
        """Build a SparseSignal from a raw vector, reading off its support."""
        values = np.ascontiguousarray(values, dtype=np.float64)
        support = np.flatnonzero(values)
        return cls(values, int(support.shape[0]), support, distribution_tag)

    @property
    def n(self):
        return int(self.values.shape[0])


@dataclass(frozen=True)
class RecoveryOutcome:
    """Everything produced by one two-step recovery run.

    l2_rel_error and linf_error are NaN (and success is False) when no true
    signal was supplied for comparison; otherwise
    success <=> l2_rel_error <= success_tol.
    """

    first_pass: np.ndarray
    approx_support: np.ndarray
    final: np.ndarray
    l2_rel_error: float
    linf_error: float
    success: bool


@dataclass(frozen=True)
class OverlapReport:
    """Support overlap between a true signal and a first-pass estimate.

    lemma1_lower_bound = k - w_at_error is the deterministic worst case for
    overlap_count: an l1 error of size t can hide at most W(x, t) true
    support entries from the top-k selection.
    """

    overlap_count: int
    overlap_fraction: float
    l1_error: float
    w_at_error: int
    lemma1_lower_bound: int


def k_support(v, k):
    """Indices of the k largest-magnitude entries of v, ties toward lower index.

    Returns a sorted integer array of length k; deterministic.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError("v must be a 1-d vector")
    n = v.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= {n}, got {k}")
    # stable sort on descending magnitude keeps the original (lower-index)
    # order among equal magnitudes
    order = np.argsort(-np.abs(v), kind="stable")
    return np.sort(order[:k])


def l1_minimize(matrix, target):
    """Minimize ||z||_1 subject to matrix @ z = target (unit weights)."""
    return basis_pursuit(matrix, target, None)


def _errors_versus(truth, estimate, success_tol):
    if truth is None:
        return math.nan, math.nan, False
    x = truth.values if isinstance(truth, SparseSignal) else np.asarray(truth, float)
    scale = float(np.linalg.norm(x))
    if scale == 0.0:
        raise ValueError("true signal must be nonzero")
    l2_rel = float(np.linalg.norm(estimate - x)) / scale
    linf = float(np.max(np.abs(estimate - x)))
    return l2_rel, linf, bool(l2_rel <= success_tol)


def two_step_recover(matrix, target, k, omega, success_tol=1e-4, *,
                     true_signal=None, first_pass=None):
    """Two-pass recovery: plain l1, then l1 reweighted off the top-k support.

    Pass one minimizes ||z||_1 subject to matrix @ z = target; L collects the
    k largest entries of that estimate; pass two minimizes
    ||z_L||_1 + omega * ||z_{L complement}||_1 under the same constraints.
    omega = 1 degenerates to pass one and returns the identical vertex.

    true_signal (optional) enables the error fields and the success flag.
    first_pass (optional) supplies a precomputed pass-one estimate so callers
    running both solvers on one instance do not repeat the identical solve.
    """
    a_mat = np.ascontiguousarray(matrix, dtype=np.float64)
    if a_mat.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    n = a_mat.shape[1]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < {n}, got {k}")
    if not omega >= 1.0:
        raise ValueError(f"omega must be >= 1, got {omega}")
    if not success_tol > 0.0:
        raise ValueError("success_tol must be positive")

    x_hat = l1_minimize(a_mat, target) if first_pass is None else np.asarray(
        first_pass, dtype=np.float64)
    support = k_support(x_hat, k)
    weights = np.full(n, float(omega))
    weights[support] = 1.0
    x_star = basis_pursuit(a_mat, target, weights)
    l2_rel, linf, success = _errors_versus(true_signal, x_star, success_tol)
    return RecoveryOutcome(
        first_pass=x_hat,
        approx_support=support,
        final=x_star,
        l2_rel_error=l2_rel,
        linf_error=linf,
        success=success,
    )


def w_of(x, budget):
    """Largest number of nonzero entries of x with total magnitude <= budget.

    The optimal subset of any given size is always the smallest-magnitude
    entries, so a greedy ascending prefix scan is exact. Nondecreasing in
    budget; w_of(x, 0) = 0 and w_of(x, ||x||_1) = k.
    """
    if budget < 0.0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    values = x.values if isinstance(x, SparseSignal) else np.asarray(x, float)
    magnitudes = np.sort(np.abs(values[values != 0.0]))
    prefix = np.cumsum(magnitudes)
    return int(np.searchsorted(prefix, budget, side="right"))


def overlap_report(x, x_hat):
    """Compare the true support K with L = top-k entries of the estimate.

    Returns an OverlapReport and checks the worst-case inequality
    overlap_count >= k - W(x, ||x - x_hat||_1) on the instance, raising
    ArithmeticError if it ever failed (it cannot, for exact arithmetic; a
    violation would indicate a solver or bookkeeping defect).
    """
    if not isinstance(x, SparseSignal):
        x = SparseSignal.from_values(x)
    if x.sparsity_k < 1:
        raise ValueError("true signal must have sparsity k >= 1")
    x_hat = np.asarray(x_hat, dtype=np.float64)
    top = k_support(x_hat, x.sparsity_k)
    overlap = int(np.intersect1d(x.support, top, assume_unique=True).shape[0])
    l1_error = float(np.sum(np.abs(x.values - x_hat)))
    w_at_error = w_of(x, l1_error)
    bound = x.sparsity_k - w_at_error
    if overlap < bound:
        raise ArithmeticError(
            f"support overlap {overlap} fell below its lower bound {bound}"
        )
    return OverlapReport(
        overlap_count=overlap,
        overlap_fraction=overlap / x.sparsity_k,
        l1_error=l1_error,
        w_at_error=w_at_error,
        lemma1_lower_bound=bound,
    )
