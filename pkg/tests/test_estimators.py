"""Scikit-learn style estimator wrappers."""
import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rewl1 import (
    BasisPursuit,
    TwoStepBasisPursuit,
    generate_matrix,
    generate_signal,
    trial_rng,
)


@pytest.fixture()
def instance():
    rng = trial_rng(77, 5, 0)
    a = generate_matrix(32, 64, rng)
    sig = generate_signal(64, 5, "gaussian", rng)
    return a, a @ sig.values, sig


def test_basis_pursuit_fit_predict(instance):
    a, y, sig = instance
    est = BasisPursuit().fit(a, y)
    assert est.coef_ == pytest.approx(sig.values, abs=1e-6)
    assert est.n_features_in_ == 64
    assert est.predict(a) == pytest.approx(y, abs=1e-6)


def test_basis_pursuit_weights_param(instance):
    a, y, _ = instance
    weights = np.full(64, 3.0)
    est = BasisPursuit(weights=weights).fit(a, y)
    # scaling all weights cannot change the selected vertex
    plain = BasisPursuit().fit(a, y)
    assert est.coef_ == pytest.approx(plain.coef_, abs=1e-8)


def test_two_step_fit_attributes(instance):
    a, y, sig = instance
    est = TwoStepBasisPursuit(k=5, omega=4.0).fit(a, y, true_signal=sig)
    assert est.outcome_.success
    assert est.support_.tolist() == sig.support.tolist()
    assert est.coef_ == pytest.approx(sig.values, abs=1e-6)
    assert est.first_pass_.shape == (64,)
    assert est.predict(a) == pytest.approx(y, abs=1e-6)


def test_clone_round_trips_params():
    est = TwoStepBasisPursuit(k=7, omega=2.5, success_tol=1e-5)
    cloned = clone(est)
    assert cloned.get_params() == {"k": 7, "omega": 2.5, "success_tol": 1e-5}
    est2 = BasisPursuit(weights=None)
    assert clone(est2).get_params() == {"weights": None}


def test_predict_before_fit_raises():
    with pytest.raises(NotFittedError):
        BasisPursuit().predict(np.eye(3))
    with pytest.raises(NotFittedError):
        TwoStepBasisPursuit(k=1).predict(np.eye(3))


def test_input_validation(instance):
    a, y, _ = instance
    with pytest.raises(ValueError):
        BasisPursuit().fit(a, y[:-1])
    with pytest.raises(ValueError):
        BasisPursuit().fit(a[0], y)
    bad = a.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        BasisPursuit().fit(bad, y)
