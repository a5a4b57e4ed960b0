"""Monte Carlo harness: determinism, config parsing, curves, CSV formats."""
import logging
import math

import numpy as np
import pytest
from sklearn.isotonic import IsotonicRegression

import rewl1.harness as harness_module
from rewl1 import (
    ExperimentConfig,
    InfeasibleError,
    estimate_crossover,
    generate_matrix,
    generate_signal,
    load_config,
    run_sweep,
    run_trial,
    trial_rng,
    write_summary_csv,
    write_trial_csv,
)
from .conftest import CHALLENGE_K_GRID


# ---------------------------------------------------------------------------
# substreams and generators
# ---------------------------------------------------------------------------

def test_trial_rng_deterministic_and_distinct():
    a = trial_rng(1, 5, 7).standard_normal(4)
    b = trial_rng(1, 5, 7).standard_normal(4)
    c = trial_rng(1, 5, 8).standard_normal(4)
    d = trial_rng(2, 5, 7).standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_generate_signal_contracts():
    sig = generate_signal(64, 9, "uniform", trial_rng(0, 9, 0))
    assert sig.n == 64
    assert sig.sparsity_k == 9
    assert np.all(np.diff(sig.support) > 0)
    assert np.count_nonzero(sig.values) == 9
    again = generate_signal(64, 9, "uniform", trial_rng(0, 9, 0))
    assert np.array_equal(sig.values, again.values)


def test_generate_signal_bpsk_magnitudes():
    sig = generate_signal(500, 200, "bpsk", trial_rng(4, 200, 0))
    magnitudes = np.abs(sig.values[sig.support])
    assert np.all(magnitudes == 1.0)
    signs = np.sign(sig.values[sig.support])
    assert np.any(signs > 0) and np.any(signs < 0)


def test_generate_signal_gaussian_mean():
    sig = generate_signal(10**6, 10**6, "gaussian", trial_rng(1, 5, 0))
    mean_abs = float(np.mean(np.abs(sig.values)))
    assert abs(mean_abs - math.sqrt(2.0 / math.pi)) < 0.005


def test_generate_signal_unknown_distribution():
    with pytest.raises(ValueError):
        generate_signal(10, 2, "cauchy", trial_rng(0, 2, 0))
    with pytest.raises(ValueError):
        generate_signal(10, 2, "custom", trial_rng(0, 2, 0))


def test_generate_matrix_statistics():
    mat = generate_matrix(100, 100, trial_rng(3, 1, 0))
    assert mat.shape == (100, 100)
    assert abs(mat.mean()) < 0.03
    assert abs(mat.var() - 1.0) < 0.05
    again = generate_matrix(100, 100, trial_rng(3, 1, 0))
    assert np.array_equal(mat, again)


def test_generate_matrix_column_norms_concentrate():
    lo, hi = 0.7 * math.sqrt(112), 1.3 * math.sqrt(112)
    for seed in range(100):
        mat = generate_matrix(112, 200, trial_rng(seed, 1, 0))
        norms = np.linalg.norm(mat, axis=0)
        assert norms.min() >= lo and norms.max() <= hi


# ---------------------------------------------------------------------------
# config validation and parsing
# ---------------------------------------------------------------------------

def test_config_validation():
    good = dict(n=50, m=25, k_grid=(5,), distribution="gaussian", seed=0)
    assert ExperimentConfig(**good).k_grid == (5,)
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "m": 50})  # m must be below n
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "k_grid": (30,)})  # k above m
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "k_grid": ()})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "distribution": "cauchy"})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "omega": 0.5})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "trials_per_k": 0})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "seed": -1})
    with pytest.raises(ValueError):
        ExperimentConfig(**{**good, "algorithms": ("nonsense",)})
    # k_grid normalized: sorted, deduplicated
    cfg = ExperimentConfig(**{**good, "k_grid": (9, 5, 5, 7)})
    assert cfg.k_grid == (5, 7, 9)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(
        "# comment\n"
        "n = 60\n"
        "m = 34\n"
        "\n"
        "k_grid = 8:12:2\n"
        "distribution = gaussian\n"
        "seed = 3\n"
        "omega = 2.5\n"
        "trials_per_k = 4\n"
        "algorithms = plain_l1,two_step\n"
    )
    cfg = load_config(path)
    assert cfg.n == 60 and cfg.m == 34
    assert cfg.k_grid == (8, 10, 12)
    assert cfg.omega == 2.5
    assert cfg.algorithms == ("plain_l1", "two_step")


def test_load_config_rejects_bad_input(tmp_path):
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("n = 60\nwibble = 3\n")
    with pytest.raises(ValueError, match="unknown.cfg:2"):
        load_config(unknown)

    repeated = tmp_path / "repeated.cfg"
    repeated.write_text("n = 60\nn = 61\n")
    with pytest.raises(ValueError, match="repeated"):
        load_config(repeated)

    missing = tmp_path / "missing.cfg"
    missing.write_text("n = 60\nm = 30\n")
    with pytest.raises(ValueError, match="k_grid"):
        load_config(missing)

    noequals = tmp_path / "noequals.cfg"
    noequals.write_text("n 60\n")
    with pytest.raises(ValueError, match="noequals.cfg:1"):
        load_config(noequals)


def test_k_grid_comma_syntax(tmp_path):
    path = tmp_path / "commas.cfg"
    path.write_text(
        "n = 60\nm = 34\nk_grid = 12,8,10\ndistribution = bpsk\nseed = 1\n"
    )
    assert load_config(path).k_grid == (8, 10, 12)


# ---------------------------------------------------------------------------
# trials and sweeps
# ---------------------------------------------------------------------------

def test_run_trial_records_failure_without_raising(monkeypatch, caplog):
    def exploding_solver(a_mat, y):
        raise InfeasibleError("synthetic failure")

    monkeypatch.setattr(harness_module, "l1_minimize", exploding_solver)
    config = ExperimentConfig(n=20, m=10, k_grid=(3,), distribution="gaussian",
                              seed=0, trials_per_k=1)
    with caplog.at_level(logging.WARNING):
        record = run_trial(config, 3, 0)
    assert record.success_plain is False
    assert record.success_two_step is False
    assert math.isnan(record.l1_error_first_pass)
    assert math.isnan(record.overlap_fraction)
    assert any("solve failed" in message for message in caplog.messages)


def test_run_sweep_plain_only():
    config = ExperimentConfig(n=40, m=22, k_grid=(4, 8), distribution="gaussian",
                              seed=5, trials_per_k=6, algorithms=("plain_l1",))
    result = run_sweep(config)
    assert [row.k for row in result.per_k] == [4, 8]
    assert len(result.records) == 12
    assert all(math.isnan(row.success_rate_two_step) for row in result.per_k)
    assert all(record.success_two_step is None for record in result.records)
    assert result.crossover_two_step is None
    assert result.config is config


def test_run_sweep_reproducible():
    config = ExperimentConfig(n=40, m=22, k_grid=(4, 8), distribution="chi4",
                              seed=5, trials_per_k=6)
    first = run_sweep(config)
    second = run_sweep(config)
    assert first.per_k == second.per_k
    assert first.records == second.records


def test_sweep_far_below_threshold_succeeds():
    # n=200, m=112, k=30: both algorithms essentially always recover
    config = ExperimentConfig(n=200, m=112, k_grid=(30,), distribution="gaussian",
                              seed=0, trials_per_k=200)
    row = run_sweep(config).per_k[0]
    assert row.success_rate_plain >= 0.99
    assert row.success_rate_two_step >= 0.99


def test_sweep_far_above_threshold_fails():
    # n=200, m=112, k=80: plain l1 essentially never recovers
    config = ExperimentConfig(n=200, m=112, k_grid=(80,), distribution="gaussian",
                              seed=0, trials_per_k=200, algorithms=("plain_l1",))
    row = run_sweep(config).per_k[0]
    assert row.success_rate_plain <= 0.05


# ---------------------------------------------------------------------------
# crossover estimation
# ---------------------------------------------------------------------------

def test_crossover_examples():
    assert estimate_crossover([(40, 1.0), (50, 0.0)]) == pytest.approx(45.0)
    assert estimate_crossover([(40, 1.0), (50, 0.8)]) is None
    assert estimate_crossover(
        [(44, 0.8), (46, 0.6), (48, 0.4)]
    ) == pytest.approx(47.0)


def test_crossover_takes_first_downward_crossing():
    points = [(10, 0.9), (20, 0.3), (30, 0.7), (40, 0.1)]
    assert estimate_crossover(points) == pytest.approx(
        10 + (0.9 - 0.5) * 10 / (0.9 - 0.3)
    )


def test_crossover_validation():
    with pytest.raises(ValueError):
        estimate_crossover([])
    with pytest.raises(ValueError):
        estimate_crossover([(10, 0.9), (10, 0.3)])


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def test_csv_outputs_are_deterministic(tmp_path):
    config = ExperimentConfig(n=40, m=22, k_grid=(4, 8), distribution="uniform",
                              seed=2, trials_per_k=3)
    result = run_sweep(config)
    paths = []
    for tag in ("one", "two"):
        trial_path = tmp_path / f"trials_{tag}.csv"
        summary_path = tmp_path / f"summary_{tag}.csv"
        write_trial_csv(trial_path, result)
        write_summary_csv(summary_path, result)
        paths.append((trial_path.read_bytes(), summary_path.read_bytes()))
    assert paths[0] == paths[1]

    header = paths[0][0].decode().splitlines()[0]
    assert header == ("distribution,n,m,k,trial,omega,success_plain,"
                      "success_two_step,overlap_fraction,l1_error")
    summary_header = paths[0][1].decode().splitlines()[0]
    assert summary_header == ("distribution,n,m,omega,k,rate_plain,"
                              "rate_two_step,mean_overlap")


def test_trial_csv_empty_cell_for_unrequested_algorithm(tmp_path):
    config = ExperimentConfig(n=40, m=22, k_grid=(4,), distribution="gaussian",
                              seed=2, trials_per_k=2, algorithms=("plain_l1",))
    path = tmp_path / "trials.csv"
    write_trial_csv(path, run_sweep(config))
    rows = path.read_text().splitlines()[1:]
    for row in rows:
        fields = row.split(",")
        assert fields[7] == ""  # success_two_step column
        assert fields[6] in {"0", "1"}


# ---------------------------------------------------------------------------
# invariants on the full challenge sweeps (session fixtures)
# ---------------------------------------------------------------------------

def test_two_step_never_substantially_hurts(gaussian_sweeps):
    for omega, sweep in gaussian_sweeps.items():
        for row in sweep.per_k:
            assert row.success_rate_two_step >= row.success_rate_plain - 0.05, (
                f"omega={omega}, k={row.k}: two-step "
                f"{row.success_rate_two_step} vs plain {row.success_rate_plain}"
            )


def test_two_step_beats_plain_at_k50_omega3(gaussian_sweeps):
    row = next(r for r in gaussian_sweeps[3.0].per_k if r.k == 50)
    assert row.success_rate_two_step > row.success_rate_plain


def test_mean_overlap_high_at_plain_crossover(gaussian_sweeps, plain_crossover):
    sweep = gaussian_sweeps[3.0]
    nearest = min(sweep.per_k, key=lambda row: abs(row.k - plain_crossover))
    assert nearest.mean_overlap > 0.75


def _isotonic_violation_statistic(rates):
    fit = IsotonicRegression(increasing=False).fit_transform(
        np.arange(len(rates), dtype=float), rates
    )
    return float(np.sum((np.asarray(rates) - fit) ** 2)), fit


def test_success_rates_nonincreasing_up_to_noise(gaussian_sweeps):
    # observed isotonic violation must sit inside the 99% band of violations
    # produced by binomial resampling around the fitted monotone curve
    rng = np.random.default_rng(123)
    trials = 200
    for omega, sweep in gaussian_sweeps.items():
        for curve in ("success_rate_plain", "success_rate_two_step"):
            rates = [getattr(row, curve) for row in sweep.per_k]
            observed, fit = _isotonic_violation_statistic(rates)
            resampled = []
            for _ in range(300):
                sample = rng.binomial(trials, fit) / trials
                stat, _ = _isotonic_violation_statistic(sample)
                resampled.append(stat)
            band = float(np.quantile(resampled, 0.99))
            assert observed <= band + 1e-12, (
                f"omega={omega} {curve}: violation {observed} > band {band}"
            )


def test_challenge_grid_definition():
    assert CHALLENGE_K_GRID == tuple(range(40, 65, 2))
