"""Seeded Monte Carlo engine for empirical recovery curves.

Each trial draws a fresh Gaussian measurement matrix and a fresh sparse
signal from a per-trial random substream derived from (seed, k, trial_index)
with a counter-based generator, so results are bit-identical no matter how
trials are scheduled. A sweep runs a k-grid of such trials, aggregates
success rates for the plain and two-step solvers, and locates the 50%
crossover of each curve by linear interpolation.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .lp import InfeasibleError, SolverError
from .recovery import SparseSignal, l1_minimize, overlap_report, two_step_recover
from .specialfn import ConvergenceError

__all__ = [
    "DISTRIBUTIONS",
    "ALGORITHMS",
    "ExperimentConfig",
    "TrialRecord",
    "KSummary",
    "SweepResult",
    "generate_signal",
    "generate_matrix",
    "trial_rng",
    "run_trial",
    "run_sweep",
    "estimate_crossover",
    "load_config",
    "write_trial_csv",
    "write_summary_csv",
]

logger = logging.getLogger(__name__)

DISTRIBUTIONS = ("gaussian", "uniform", "rayleigh", "chi4", "chi6", "bpsk")
ALGORITHMS = ("plain_l1", "two_step")
_SOLVER_ERRORS = (InfeasibleError, SolverError, ConvergenceError)


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one sweep; equal configs give equal results."""

    n: int
    m: int
    k_grid: tuple
    distribution: str
    seed: int
    omega: float = 3.0
    trials_per_k: int = 200
    success_tol: float = 1e-4
    algorithms: tuple = ALGORITHMS

    def __post_init__(self):
        if not 1 <= self.m < self.n:
            raise ValueError(f"need 1 <= m < n, got m={self.m}, n={self.n}")
        k_grid = tuple(sorted({int(k) for k in self.k_grid}))
        if not k_grid:
            raise ValueError("k_grid must be nonempty")
        for k in k_grid:
            if not 1 <= k <= self.m:
                raise ValueError(f"every k must satisfy 1 <= k <= m={self.m}, got {k}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(
                f"unknown distribution {self.distribution!r}; "
                f"expected one of {DISTRIBUTIONS}"
            )
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not (math.isfinite(self.omega) and self.omega >= 1.0):
            raise ValueError(f"omega must be finite and >= 1, got {self.omega}")
        if self.trials_per_k < 1:
            raise ValueError(f"trials_per_k must be >= 1, got {self.trials_per_k}")
        if not self.success_tol > 0.0:
            raise ValueError(f"success_tol must be positive, got {self.success_tol}")
        algorithms = tuple(a for a in ALGORITHMS if a in self.algorithms)
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        if not algorithms:
            raise ValueError(f"algorithms must include at least one of {ALGORITHMS}")
        object.__setattr__(self, "k_grid", k_grid)
        object.__setattr__(self, "algorithms", algorithms)


@dataclass(frozen=True)
class TrialRecord:
    """One trial's outcome. success_two_step is None when the two_step
    algorithm was not requested; overlap_fraction and l1_error_first_pass are
    NaN in the (logged, never-aborting) event that the first-pass solve
    failed outright."""

    k: int
    trial_index: int
    success_plain: bool
    success_two_step: object
    overlap_fraction: float
    l1_error_first_pass: float


@dataclass(frozen=True)
class KSummary:
    """Aggregates for one k: success rates and the mean first-pass overlap."""

    k: int
    success_rate_plain: float
    success_rate_two_step: float
    mean_overlap: float


@dataclass(frozen=True)
class SweepResult:
    """per_k aggregates plus interpolated 50% crossovers (None if a curve
    never crosses within the grid) and the raw trial records."""

    per_k: tuple
    crossover_plain: object
    crossover_two_step: object
    records: tuple = field(repr=False, default=())
    config: ExperimentConfig = field(repr=False, default=None)


def trial_rng(seed, k, trial_index):
    """Counter-based generator for one trial, derived from (seed, k, trial)."""
    sequence = np.random.SeedSequence((int(seed), int(k), int(trial_index)))
    return np.random.Generator(np.random.Philox(sequence))


def generate_signal(n, k, distribution, rng_state):
    """Draw an exactly k-sparse length-n signal.

    The support is a uniform k-subset; nonzero magnitudes are iid from the
    named distribution (gaussian -> |N(0,1)|, uniform -> U[0,1], rayleigh ->
    scale 1, chi4/chi6 -> chi with 4/6 degrees of freedom, bpsk -> constant
    1); independent uniform signs make every distribution symmetric. Draw
    order is support, then magnitudes, then signs — fixed, so outputs are
    deterministic given the generator state.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if distribution not in DISTRIBUTIONS:
        raise ValueError(
            f"unknown distribution {distribution!r}; expected one of {DISTRIBUTIONS}"
        )
    support = np.sort(rng_state.choice(n, size=k, replace=False))
    if distribution == "gaussian":
        magnitudes = np.abs(rng_state.standard_normal(k))
    elif distribution == "uniform":
        magnitudes = rng_state.uniform(0.0, 1.0, size=k)
    elif distribution == "rayleigh":
        magnitudes = rng_state.rayleigh(1.0, size=k)
    elif distribution == "chi4":
        magnitudes = np.sqrt(rng_state.chisquare(4, size=k))
    elif distribution == "chi6":
        magnitudes = np.sqrt(rng_state.chisquare(6, size=k))
    else:  # bpsk
        magnitudes = np.ones(k)
    signs = rng_state.choice(np.array([-1.0, 1.0]), size=k)
    values = np.zeros(n)
    values[support] = signs * magnitudes
    return SparseSignal(values, int(k), support, distribution)


def generate_matrix(m, n, rng_state):
    """m x n measurement matrix with iid standard normal entries."""
    if m < 1 or n < 1:
        raise ValueError(f"matrix dimensions must be >= 1, got {m} x {n}")
    return rng_state.standard_normal((m, n))


def run_trial(config, k, trial_index):
    """One seeded trial: draw (A, x), solve, and record both outcomes.

    The first-pass solve is shared: it is the plain-l1 answer and the input
    to the reweighted pass. Solver failures are logged and scored as recovery
    failures; they never raise out of the trial.
    """
    rng = trial_rng(config.seed, k, trial_index)
    a_mat = generate_matrix(config.m, config.n, rng)
    signal = generate_signal(config.n, k, config.distribution, rng)
    y = a_mat @ signal.values
    want_two_step = "two_step" in config.algorithms

    try:
        x_hat = l1_minimize(a_mat, y)
    except _SOLVER_ERRORS as exc:
        logger.warning(
            "first-pass solve failed at k=%d trial=%d: %s", k, trial_index, exc
        )
        return TrialRecord(k, trial_index, False,
                           False if want_two_step else None,
                           math.nan, math.nan)

    report = overlap_report(signal, x_hat)
    scale = float(np.linalg.norm(signal.values))
    success_plain = bool(
        float(np.linalg.norm(x_hat - signal.values)) / scale <= config.success_tol
    )

    success_two_step = None
    if want_two_step:
        try:
            outcome = two_step_recover(
                a_mat, y, k, config.omega, config.success_tol,
                true_signal=signal, first_pass=x_hat,
            )
            success_two_step = outcome.success
        except _SOLVER_ERRORS as exc:
            logger.warning(
                "second-pass solve failed at k=%d trial=%d: %s", k, trial_index, exc
            )
            success_two_step = False

    return TrialRecord(
        k=k,
        trial_index=trial_index,
        success_plain=success_plain,
        success_two_step=success_two_step,
        overlap_fraction=report.overlap_fraction,
        l1_error_first_pass=report.l1_error,
    )


def run_sweep(config):
    """Run every (k, trial) cell of the config and aggregate.

    Trials are independent given their substreams and the reduction is
    ordered by (k, trial_index), so the result is identical for any
    execution order or degree of parallelism.
    """
    records = []
    per_k = []
    for k in config.k_grid:
        rows = [run_trial(config, k, t) for t in range(config.trials_per_k)]
        records.extend(rows)
        rate_plain = float(np.mean([r.success_plain for r in rows]))
        if "two_step" in config.algorithms:
            rate_two = float(np.mean([bool(r.success_two_step) for r in rows]))
        else:
            rate_two = math.nan
        overlaps = np.array([r.overlap_fraction for r in rows])
        mean_overlap = float(np.nanmean(overlaps)) if np.any(
            np.isfinite(overlaps)) else math.nan
        per_k.append(KSummary(k, rate_plain, rate_two, mean_overlap))

    crossover_plain = estimate_crossover(
        [(s.k, s.success_rate_plain) for s in per_k]
    )
    crossover_two = estimate_crossover(
        [(s.k, s.success_rate_two_step) for s in per_k]
    )
    return SweepResult(
        per_k=tuple(per_k),
        crossover_plain=crossover_plain,
        crossover_two_step=crossover_two,
        records=tuple(records),
        config=config,
    )


def estimate_crossover(points):
    """k at which a success-rate curve first crosses 0.5 going down.

    points is a nonempty list of (k, rate) sorted by k. The crossing is
    linearly interpolated inside the first interval with rate_i >= 0.5 >
    rate_{i+1}; returns None when the curve never crosses downward within
    the grid (e.g. (40, 1.0), (50, 0.0) -> 45.0).
    """
    pts = [(float(k), float(r)) for k, r in points]
    if not pts:
        raise ValueError("points must be nonempty")
    if any(k1 >= k2 for (k1, _), (k2, _) in zip(pts, pts[1:])):
        raise ValueError("points must be sorted by strictly increasing k")
    for (k0, r0), (k1, r1) in zip(pts, pts[1:]):
        if r0 >= 0.5 > r1:
            return k0 + (r0 - 0.5) * (k1 - k0) / (r0 - r1)
    return None


# ---------------------------------------------------------------------------
# config file and CSV formats
# ---------------------------------------------------------------------------

def _parse_k_grid(text):
    """k_grid syntax: comma list "40,42,44" or inclusive range "40:64:2"."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad k_grid range {text!r}; use start:stop[:step]")
        start, stop = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
        if step < 1 or stop < start:
            raise ValueError(f"bad k_grid range {text!r}; need start <= stop, step >= 1")
        return tuple(range(start, stop + 1, step))
    return tuple(int(piece) for piece in text.split(","))


_CONFIG_PARSERS = {
    "n": int,
    "m": int,
    "k_grid": _parse_k_grid,
    "distribution": str,
    "seed": int,
    "omega": float,
    "trials_per_k": int,
    "success_tol": float,
    "algorithms": lambda text: tuple(piece.strip() for piece in text.split(",")),
}


def load_config(path):
    """Read an ExperimentConfig from flat key = value text.

    One field per line, keys named exactly as the config fields; blank lines
    and lines starting with '#' are ignored. Unknown or repeated keys are
    rejected.
    """
    values = {}
    with open(path) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
            key, _, text = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            if key in values:
                raise ValueError(f"{path}:{lineno}: repeated config key {key!r}")
            try:
                values[key] = _CONFIG_PARSERS[key](text.strip())
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {exc}")
    missing = {"n", "m", "k_grid", "distribution", "seed"} - set(values)
    if missing:
        raise ValueError(f"{path}: missing required config keys {sorted(missing)}")
    return ExperimentConfig(**values)


def _fmt(value):
    return format(float(value), ".12g")


def _open_for(destination):
    own = isinstance(destination, (str, bytes)) or hasattr(destination, "__fspath__")
    return (open(destination, "w", newline="") if own else destination), own


def write_trial_csv(destination, result):
    """One row per trial: distribution,n,m,k,trial,omega,success_plain,
    success_two_step,overlap_fraction,l1_error. Booleans are 1/0; an
    unrequested two-step column is empty."""
    config = result.config
    stream, own = _open_for(destination)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow([
            "distribution", "n", "m", "k", "trial", "omega", "success_plain",
            "success_two_step", "overlap_fraction", "l1_error",
        ])
        for rec in result.records:
            writer.writerow([
                config.distribution, config.n, config.m, rec.k, rec.trial_index,
                _fmt(config.omega), int(rec.success_plain),
                "" if rec.success_two_step is None else int(rec.success_two_step),
                _fmt(rec.overlap_fraction), _fmt(rec.l1_error_first_pass),
            ])
    finally:
        if own:
            stream.close()


def write_summary_csv(destination, result):
    """One row per k: distribution,n,m,omega,k,rate_plain,rate_two_step,
    mean_overlap."""
    config = result.config
    stream, own = _open_for(destination)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow([
            "distribution", "n", "m", "omega", "k", "rate_plain",
            "rate_two_step", "mean_overlap",
        ])
        for row in result.per_k:
            writer.writerow([
                config.distribution, config.n, config.m, _fmt(config.omega),
                row.k, _fmt(row.success_rate_plain),
                _fmt(row.success_rate_two_step), _fmt(row.mean_overlap),
            ])
    finally:
        if own:
            stream.close()
