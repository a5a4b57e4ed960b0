"""Shared fixtures: the expensive seeded sweeps are built once per session.

The Gaussian sweeps at n=200, m=112 with 200 trials per k back several
tests (crossover windows, dominance and overlap invariants, the isotonic
check), so they are session-scoped; everything else is cheap.
"""
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rewl1 import ExperimentConfig, run_sweep

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

CHALLENGE_N = 200
CHALLENGE_M = 112
CHALLENGE_K_GRID = tuple(range(40, 65, 2))
CHALLENGE_TRIALS = 200
CHALLENGE_SEED = 0
OMEGA_GRID = (2.0, 3.0, 5.0, 10.0)


def _challenge_config(distribution, omega):
    return ExperimentConfig(
        n=CHALLENGE_N,
        m=CHALLENGE_M,
        k_grid=CHALLENGE_K_GRID,
        distribution=distribution,
        seed=CHALLENGE_SEED,
        omega=omega,
        trials_per_k=CHALLENGE_TRIALS,
    )


@pytest.fixture(scope="session")
def gaussian_sweeps():
    """Gaussian success curves for each omega in the sweep grid."""
    return {
        omega: run_sweep(_challenge_config("gaussian", omega))
        for omega in OMEGA_GRID
    }


@pytest.fixture(scope="session")
def best_omega(gaussian_sweeps):
    """The omega whose two-step crossover is largest."""
    candidates = {
        omega: sweep.crossover_two_step
        for omega, sweep in gaussian_sweeps.items()
        if sweep.crossover_two_step is not None
    }
    assert candidates, "no two-step crossover found on the sweep grid"
    return max(candidates, key=lambda omega: (candidates[omega], omega))


@pytest.fixture(scope="session")
def bpsk_sweep(best_omega):
    """BPSK curves at the omega that was best for Gaussian signals."""
    return run_sweep(_challenge_config("bpsk", best_omega))


@pytest.fixture(scope="session")
def plain_crossover(gaussian_sweeps):
    values = [s.crossover_plain for s in gaussian_sweeps.values()]
    assert all(v == values[0] for v in values), (
        "plain-l1 crossover must not depend on omega (shared substreams)"
    )
    assert values[0] is not None
    return values[0]


def rel_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
