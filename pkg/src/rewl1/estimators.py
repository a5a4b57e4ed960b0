"""Estimator-style wrappers around the recovery solvers.

Both classes follow the fit/predict convention: `fit(X, y)` treats X as the
measurement matrix and y as the observed measurements, stores the recovered
coefficient vector as `coef_`, and `predict(X)` returns X @ coef_. Because
the model is exact interpolation of sparse signals, `fit` requires y to lie
in the column span of X and raises the solver's infeasibility error
otherwise.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .lp import basis_pursuit
from .recovery import two_step_recover

__all__ = ["BasisPursuit", "TwoStepBasisPursuit"]


def _check_inputs(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ValueError(
            f"y must be a vector of length {X.shape[0]}, got shape {y.shape}"
        )
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("X and y must be finite")
    return X, y


class BasisPursuit(BaseEstimator):
    """Minimum weighted-l1-norm interpolation: coef_ solves
    min sum_i weights_i |z_i| subject to X @ z = y.

    Parameters
    ----------
    weights : array of positive reals, length n_features, or None
        None means unit weights (plain l1 minimization).
    """

    def __init__(self, weights=None):
        self.weights = weights

    def fit(self, X, y):
        X, y = _check_inputs(X, y)
        self.coef_ = basis_pursuit(X, y, self.weights)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = np.ascontiguousarray(X, dtype=np.float64)
        return X @ self.coef_


class TwoStepBasisPursuit(BaseEstimator):
    """Two-pass recovery: plain l1, then l1 reweighted off the estimated
    support.

    The first pass solves min ||z||_1 s.t. X @ z = y; the indices of its k
    largest entries form the support estimate L (stored as `support_`); the
    second pass solves min ||z_L||_1 + omega * ||z_{L^c}||_1 under the same
    constraints and its solution is stored as `coef_` (the first pass as
    `first_pass_`).

    Parameters
    ----------
    k : int
        Assumed sparsity of the underlying signal.
    omega : real >= 1
        Penalty applied outside the estimated support; 1 reproduces plain l1.
    success_tol : real
        Relative l2 error below which recovery counts as a success when a
        true signal is passed to fit.
    """

    def __init__(self, k, omega=3.0, success_tol=1e-4):
        self.k = k
        self.omega = omega
        self.success_tol = success_tol

    def fit(self, X, y, true_signal=None):
        X, y = _check_inputs(X, y)
        outcome = two_step_recover(
            X, y, self.k, self.omega, self.success_tol, true_signal=true_signal
        )
        self.coef_ = outcome.final
        self.first_pass_ = outcome.first_pass
        self.support_ = outcome.approx_support
        self.outcome_ = outcome
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = np.ascontiguousarray(X, dtype=np.float64)
        return X @ self.coef_
