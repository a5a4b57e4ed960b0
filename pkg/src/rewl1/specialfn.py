"""Scalar special functions and deterministic root finding.

Everything here is a small, pure numerical primitive: the Gaussian tail
integral Q and its inverse, the scaled error function G with its density g,
binary entropy, two asymptotic order-statistic quantities for half-normal
samples, and a bracketing root-finder.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import special as _sp

__all__ = [
    "Bracket",
    "OrderStatParams",
    "ConvergenceError",
    "gaussian_q",
    "gaussian_q_inv",
    "erf_scaled",
    "gauss_density_scaled",
    "binary_entropy",
    "topmass_fraction",
    "w_fraction_asymptotic",
    "find_root",
]

SQRT2 = math.sqrt(2.0)
TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


class ConvergenceError(RuntimeError):
    """A root search failed to bracket a sign change or to converge."""


@dataclass(frozen=True)
class Bracket:
    """A sign-changing interval [lo, hi] handed to `find_root`."""

    lo: float
    hi: float
    tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")
        if not self.tol > 0:
            raise ValueError("bracket tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be a positive integer")


@dataclass(frozen=True)
class OrderStatParams:
    """Retained-fraction parameter theta = M/N for half-normal order statistics."""

    theta: float = field(default=1.0)

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")


def gaussian_q(x):
    """Gaussian tail integral Q(x) = (1/sqrt(2*pi)) * int_x^inf exp(-y^2/2) dy."""
    if not math.isfinite(x):
        raise ValueError(f"gaussian_q requires a finite argument, got {x}")
    return 0.5 * float(_sp.erfc(x / SQRT2))


def gaussian_q_inv(p):
    """Inverse of `gaussian_q`: the x with Q(x) = p, for p in (0, 1).

    Evaluated as -ndtri(p), which stays accurate for p near 0 because the
    complement 1 - p is never formed.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"gaussian_q_inv requires p in (0, 1), got {p}")
    return -float(_sp.ndtri(p))


def erf_scaled(x):
    """G(x) = (2/sqrt(pi)) * int_0^x exp(-y^2) dy, for x >= 0."""
    if x < 0:
        raise ValueError(f"erf_scaled is defined for x >= 0, got {x}")
    return float(_sp.erf(x))


def gauss_density_scaled(x):
    """g(x) = (2/sqrt(pi)) * exp(-x^2), the derivative of `erf_scaled`."""
    if x < 0:
        raise ValueError(f"gauss_density_scaled is defined for x >= 0, got {x}")
    return TWO_OVER_SQRT_PI * math.exp(-x * x)


def binary_entropy(p):
    """Shannon entropy -p*log2(p) - (1-p)*log2(1-p) in bits, with 0*log0 = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy requires p in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def topmass_fraction(theta):
    """Asymptotic l1-mass fraction carried by the largest theta*N of N half-normals.

    Equals exp(-Psi(theta/2)^2 / 2) with Psi the inverse Gaussian tail;
    monotone increasing from 0 at theta=0 to 1 at theta=1.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"topmass_fraction requires theta in [0, 1], got {theta}")
    if theta == 0.0:
        return 0.0
    psi = gaussian_q_inv(theta / 2.0)
    return math.exp(-0.5 * psi * psi)


def w_fraction_asymptotic(alpha):
    """Asymptotic support fraction of a Gaussian signal hideable in l1 budget alpha.

    For alpha in [0, 1): the largest fraction of support entries whose total
    magnitude stays below alpha times the signal's l1 norm, in the large-n
    limit; equals 1 - 2*Q(sqrt(-2*ln(1-alpha))).
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"w_fraction_asymptotic requires alpha in [0, 1), got {alpha}")
    if alpha == 0.0:
        return 0.0
    return 1.0 - 2.0 * gaussian_q(math.sqrt(-2.0 * math.log1p(-alpha)))


def find_root(f, bracket):
    """Deterministic bracketing root search: bisection refined by secant steps.

    Each iteration tries a secant step from the current endpoints and falls
    back to the midpoint whenever the secant candidate leaves the bracket or
    fails to shrink it; the sign-change interval is maintained throughout.

    Returns r with |f(r)| = 0 or final bracket width <= bracket.tol.
    Raises ConvergenceError if [lo, hi] does not change sign or max_iter is
    exhausted before the width tolerance is met.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ConvergenceError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
        )
    force_bisect = False
    for _ in range(bracket.max_iter):
        width = hi - lo
        if width <= bracket.tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        point = mid
        denom = fhi - flo
        if not force_bisect and denom != 0.0:
            sec = (lo * fhi - hi * flo) / denom
            if lo < sec < hi:
                point = sec
        fpoint = f(point)
        if fpoint == 0.0:
            return point
        if (fpoint > 0) == (flo > 0):
            lo, flo = point, fpoint
        else:
            hi, fhi = point, fpoint
        # a secant step that failed to shrink the bracket much gets followed
        # by a plain bisection, so the width provably halves every two steps
        force_bisect = (hi - lo) > 0.55 * width
    if hi - lo <= bracket.tol:
        return 0.5 * (lo + hi)
    raise ConvergenceError(
        f"root not located to tol={bracket.tol} within {bracket.max_iter} iterations"
    )
