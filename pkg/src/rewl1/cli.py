"""Command-line interface: recovery runs, threshold tables, and sweeps.

Exit codes: 0 for a completed run, 2 for usage or validation errors, 3 for
numerical failures (infeasible systems, non-converging searches). All
randomness derives from the --seed flag through per-trial substreams, so
every command is reproducible byte for byte.
"""
from __future__ import annotations

import csv
import functools
import sys
import warnings
from pathlib import Path

import click
import numpy as np

from .harness import (
    DISTRIBUTIONS,
    ExperimentConfig,
    generate_matrix,
    generate_signal,
    load_config,
    run_sweep,
    trial_rng,
    write_summary_csv,
    write_trial_csv,
)
from .lp import InfeasibleError, SolverError
from .recovery import l1_minimize, overlap_report, two_step_recover
from .specialfn import ConvergenceError
from .thresholds import (
    ThresholdQuery,
    delta_c_details,
    theorem3_check,
    weak_threshold,
    write_threshold_csv,
)

_NUMERICAL_ERRORS = (InfeasibleError, SolverError, ConvergenceError, ArithmeticError)


def _numerical_guard(fn):
    """Map solver-level failures to exit code 3, usage mistakes to exit 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _NUMERICAL_ERRORS as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)
        except ValueError as exc:
            raise click.UsageError(str(exc))

    return wrapper


@click.group()
def main():
    """Sparse recovery via plain and reweighted l1 minimization, with the
    matching phase-transition calculators."""


# ---------------------------------------------------------------------------
# recover
# ---------------------------------------------------------------------------

@main.command()
@click.option("--synthetic", is_flag=True,
              help="Generate the instance: Gaussian A (m x n) and a k-sparse "
                   "signal from --distribution, both from --seed.")
@click.option("--matrix-file", type=click.Path(exists=True, dir_okay=False),
              help="Whitespace-delimited matrix A; used with --signal-file.")
@click.option("--signal-file", type=click.Path(exists=True, dir_okay=False),
              help="True signal x as one number per line; y is computed as A @ x.")
@click.option("--n", type=int, default=200, show_default=True,
              help="Signal dimension (synthetic mode).")
@click.option("--m", type=int, default=112, show_default=True,
              help="Number of measurements (synthetic mode).")
@click.option("--k", type=int, required=True, help="Assumed sparsity.")
@click.option("--omega", type=float, required=True,
              help="Second-pass weight off the estimated support; 1 "
                   "degenerates to plain l1.")
@click.option("--distribution", type=click.Choice(DISTRIBUTIONS),
              default="gaussian", show_default=True,
              help="Nonzero-magnitude distribution (synthetic mode).")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the trial substream (seed, k, 0).")
@click.option("--success-tol", type=float, default=1e-4, show_default=True,
              help="Relative l2 error counted as perfect recovery.")
@click.option("--output-prefix", type=click.Path(),
              help="Write <prefix>.first_pass.txt, <prefix>.support.txt, "
                   "<prefix>.final.txt.")
@_numerical_guard
def recover(synthetic, matrix_file, signal_file, n, m, k, omega, distribution,
            seed, success_tol, output_prefix):
    """Run two-step recovery on one instance and report both passes.

    Pass one solves min ||z||_1 s.t. Az = y; its k largest entries form the
    support estimate L; pass two solves min ||z_L||_1 + omega*||z_Lc||_1
    s.t. Az = y. Success means relative l2 error <= --success-tol against
    the true signal.
    """
    if synthetic == bool(matrix_file or signal_file):
        raise click.UsageError(
            "choose exactly one input mode: --synthetic, or both "
            "--matrix-file and --signal-file"
        )
    if synthetic:
        rng = trial_rng(seed, k, 0)
        a_mat = generate_matrix(m, n, rng)
        signal = generate_signal(n, k, distribution, rng)
    else:
        if not (matrix_file and signal_file):
            raise click.UsageError("--matrix-file and --signal-file go together")
        try:
            a_mat = np.loadtxt(matrix_file, ndmin=2)
            x_true = np.loadtxt(signal_file)
        except Exception as exc:
            raise click.UsageError(f"could not parse input files: {exc}")
        from .recovery import SparseSignal
        signal = SparseSignal.from_values(np.atleast_1d(x_true))
        if a_mat.shape[1] != signal.n:
            raise click.UsageError(
                f"matrix has {a_mat.shape[1]} columns but signal length is {signal.n}"
            )
    y = a_mat @ signal.values

    outcome = two_step_recover(a_mat, y, k, omega, success_tol,
                               true_signal=signal)
    report = overlap_report(signal, outcome.first_pass)
    scale = float(np.linalg.norm(signal.values))
    plain_rel = float(np.linalg.norm(outcome.first_pass - signal.values)) / scale
    pass_delta = float(np.max(np.abs(outcome.final - outcome.first_pass)))

    click.echo(f"instance: n={signal.n} m={a_mat.shape[0]} k={k} "
               f"distribution={signal.distribution_tag} omega={omega:g}")
    click.echo(f"plain l1      : rel l2 error {plain_rel:.3e} -> "
               f"{'success' if plain_rel <= success_tol else 'failure'}")
    click.echo(f"two-step      : rel l2 error {outcome.l2_rel_error:.3e} -> "
               f"{'success' if outcome.success else 'failure'}")
    click.echo(f"support overlap: {report.overlap_count}/{k} "
               f"(fraction {report.overlap_fraction:.4f}, "
               f"lower bound {report.lemma1_lower_bound})")
    click.echo(f"first-pass l1 error: {report.l1_error:.6g}")
    click.echo(f"max |two-step - plain|: {pass_delta:.3e}")

    if output_prefix:
        prefix = Path(output_prefix)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(f"{prefix}.first_pass.txt", outcome.first_pass, fmt="%.17g")
        np.savetxt(f"{prefix}.support.txt", outcome.approx_support, fmt="%d")
        np.savetxt(f"{prefix}.final.txt", outcome.final, fmt="%.17g")
        click.echo(f"wrote {prefix}.first_pass.txt, {prefix}.support.txt, "
                   f"{prefix}.final.txt")


# ---------------------------------------------------------------------------
# threshold
# ---------------------------------------------------------------------------

def _echo_or_write(text, output):
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--gamma1", type=float, help="First class fraction, in (0, 1).")
@click.option("--f1", type=float, help="Support density on the first class.")
@click.option("--f2", type=float, help="Support density on the second class.")
@click.option("--omega", type=float, help="Weight applied to the second class.")
@click.option("--batch", type=click.Path(exists=True, dir_okay=False),
              help="CSV of queries with header gamma1,f1,f2,omega "
                   "(replaces the single-query flags).")
@click.option("--grid-resolution", type=int, default=400, show_default=True,
              help="Points per tau axis in the gap maximization.")
@click.option("--tol", type=float, default=1e-4, show_default=True,
              help="Bisection tolerance on delta.")
@click.option("--output", type=click.Path(),
              help="Write the CSV here instead of standard output.")
@_numerical_guard
def threshold(gamma1, f1, f2, omega, batch, grid_resolution, tol, output):
    """Critical measurement ratio delta_c(gamma1, f1, f2, omega).

    delta_c is the smallest delta = m/n keeping the exponent gap
    psi_com - psi_int - psi_ext negative over every admissible (tau1, tau2)
    with tau1 + tau2 > delta - (gamma1*f1 + gamma2*f2), gamma2 = 1 - gamma1.
    Output is CSV with header gamma1,f1,f2,omega,delta_c.
    """
    if batch:
        queries = []
        with open(batch, newline="") as handle:
            reader = csv.DictReader(handle)
            expected = {"gamma1", "f1", "f2", "omega"}
            if reader.fieldnames is None or set(reader.fieldnames) != expected:
                raise click.UsageError(
                    f"batch file must have header gamma1,f1,f2,omega, "
                    f"got {reader.fieldnames}"
                )
            for row in reader:
                g1 = float(row["gamma1"])
                queries.append(ThresholdQuery(
                    g1, 1.0 - g1, float(row["f1"]), float(row["f2"]),
                    float(row["omega"]),
                ))
    else:
        if None in (gamma1, f1, f2, omega):
            raise click.UsageError(
                "provide --gamma1 --f1 --f2 --omega, or --batch"
            )
        queries = [ThresholdQuery(gamma1, 1.0 - gamma1, f1, f2, omega)]

    entries = []
    for query in queries:
        with warnings.catch_warnings():
            # the saturation warning is re-reported below in CLI voice
            warnings.simplefilter("ignore", RuntimeWarning)
            result = delta_c_details(query, grid_resolution, tol)
        if result.saturated:
            click.echo(
                f"warning: threshold saturated at 1 for gamma1={query.gamma1}",
                err=True,
            )
        entries.append((query, result.value))

    import io
    buffer = io.StringIO()
    write_threshold_csv(buffer, entries)
    _echo_or_write(buffer.getvalue(), output)


# ---------------------------------------------------------------------------
# weak-threshold
# ---------------------------------------------------------------------------

@main.command("weak-threshold")
@click.option("--delta", type=float, required=True,
              help="Measurement ratio m/n, in (0, 1).")
@click.option("--tol", type=float, default=1e-4, show_default=True,
              help="Bisection tolerance on mu.")
@click.option("--grid-resolution", type=int, default=400, show_default=True,
              help="Points per tau axis in the gap maximization.")
@click.option("--n", type=int, default=None,
              help="Also report n * mu_weak, the largest recoverable "
                   "sparsity count at dimension n.")
@_numerical_guard
def weak_threshold_cmd(delta, tol, grid_resolution, n):
    """Weak threshold mu_W(delta) of plain l1 minimization.

    The largest sparsity fraction mu = k/n recoverable at measurement ratio
    delta: the inverse of mu -> delta_c(mu, 1-mu, f1=1, f2=0, omega=1).
    """
    value = weak_threshold(delta, tol, grid_resolution=grid_resolution)
    click.echo(f"mu_weak({delta:g}) = {value:.10g}")
    if n is not None:
        click.echo(f"n * mu_weak = {n * value:.6g}")


# ---------------------------------------------------------------------------
# theorem3
# ---------------------------------------------------------------------------

@main.command()
@click.option("--delta", type=float, required=True,
              help="Measurement ratio m/n, in (0, 1).")
@click.option("--omega", type=float, required=True,
              help="Second-pass weight; omega = 1 degenerates to equality.")
@click.option("--tol", type=float, default=1e-4, show_default=True,
              help="Bisection tolerance.")
@click.option("--grid-resolution", type=int, default=400, show_default=True,
              help="Points per tau axis in the gap maximization.")
@_numerical_guard
def theorem3(delta, omega, tol, grid_resolution):
    """Check delta_c(mu_W(delta), 1-mu_W(delta), 1, 0, omega) < delta.

    A pass certifies that, at the sparsity plain l1 can barely handle,
    weighting the second pass by omega strictly lowers the number of
    measurements needed: the margin is delta - delta_c.
    """
    result = theorem3_check(delta, omega, tol=tol,
                            grid_resolution=grid_resolution)
    click.echo(f"mu_weak({delta:g})  = {result.mu_weak:.10g}")
    click.echo(f"delta_c(omega={omega:g}) = {result.delta_c_value:.10g}")
    click.echo(f"margin          = {result.margin:.10g}")
    click.echo("PASS" if result.passed else "FAIL")


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

@main.command()
@click.option("--config", "config_path",
              type=click.Path(exists=True, dir_okay=False),
              help="Flat key = value config file (replaces the inline flags).")
@click.option("--n", type=int, help="Signal dimension.")
@click.option("--m", type=int, help="Number of measurements.")
@click.option("--k-grid", type=str,
              help="Sparsities: comma list 40,42 or inclusive range 40:64:2.")
@click.option("--distribution", type=click.Choice(DISTRIBUTIONS),
              help="Nonzero-magnitude distribution.")
@click.option("--omega", type=float, default=3.0, show_default=True,
              help="Second-pass weight.")
@click.option("--trials", type=int, default=200, show_default=True,
              help="Trials per k.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Master seed; trials use substreams (seed, k, trial).")
@click.option("--success-tol", type=float, default=1e-4, show_default=True,
              help="Relative l2 error counted as perfect recovery.")
@click.option("--algorithms", type=str, default="plain_l1,two_step",
              show_default=True, help="Comma subset of plain_l1,two_step.")
@click.option("--output-dir", type=click.Path(file_okay=False), default=".",
              show_default=True,
              help="Directory for trials.csv and summary.csv.")
@_numerical_guard
def sweep(config_path, n, m, k_grid, distribution, omega, trials, seed,
          success_tol, algorithms, output_dir):
    """Monte Carlo success-rate curves over a sparsity grid.

    Per trial: fresh Gaussian A and fresh k-sparse signal from the substream
    (seed, k, trial); success is relative l2 error <= --success-tol. Writes
    trials.csv (one row per trial) and summary.csv (one row per k), and
    prints both 50% crossovers (linear interpolation of the first downward
    crossing).
    """
    if config_path:
        if any(v is not None for v in (n, m, k_grid, distribution)):
            raise click.UsageError("--config replaces the inline flags; "
                                   "pass one or the other")
        config = load_config(config_path)
    else:
        if None in (n, m, k_grid, distribution):
            raise click.UsageError(
                "provide --n --m --k-grid --distribution, or --config"
            )
        from .harness import _parse_k_grid
        config = ExperimentConfig(
            n=n, m=m, k_grid=_parse_k_grid(k_grid), distribution=distribution,
            seed=seed, omega=omega, trials_per_k=trials,
            success_tol=success_tol,
            algorithms=tuple(a.strip() for a in algorithms.split(",")),
        )

    result = run_sweep(config)

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trial_csv(out / "trials.csv", result)
    write_summary_csv(out / "summary.csv", result)

    click.echo(f"{'k':>4}  {'rate_plain':>10}  {'rate_two_step':>13}  "
               f"{'mean_overlap':>12}")
    for row in result.per_k:
        click.echo(f"{row.k:>4}  {row.success_rate_plain:>10.3f}  "
                   f"{row.success_rate_two_step:>13.3f}  "
                   f"{row.mean_overlap:>12.4f}")
    plain = result.crossover_plain
    two = result.crossover_two_step
    click.echo(f"crossover plain_l1 : "
               f"{'none within grid' if plain is None else format(plain, '.3f')}")
    click.echo(f"crossover two_step : "
               f"{'none within grid' if two is None else format(two, '.3f')}")
    click.echo(f"wrote {out / 'trials.csv'} and {out / 'summary.csv'}")


# ---------------------------------------------------------------------------
# overlap
# ---------------------------------------------------------------------------

@main.command()
@click.option("--n", type=int, default=200, show_default=True,
              help="Signal dimension.")
@click.option("--m", type=int, default=112, show_default=True,
              help="Number of measurements.")
@click.option("--k", type=int, required=True, help="Signal sparsity.")
@click.option("--distribution", type=click.Choice(DISTRIBUTIONS),
              default="gaussian", show_default=True,
              help="Nonzero-magnitude distribution.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Master seed; trials use substreams (seed, k, trial).")
@click.option("--trials", type=int, default=100, show_default=True,
              help="Number of seeded trials.")
@_numerical_guard
def overlap(n, m, k, distribution, seed, trials):
    """First-pass support overlap statistics over seeded trials.

    For each trial, solves plain l1 and reports how much of the true support
    appears among the k largest entries of the estimate, together with the
    worst-case bound overlap >= k - W(x, ||x - x_hat||_1), where W counts
    the smallest-magnitude true entries that fit inside the error budget.
    """
    if trials < 1:
        raise click.UsageError("--trials must be >= 1")
    fractions = []
    margins = []
    l1_errors = []
    for index in range(trials):
        rng = trial_rng(seed, k, index)
        a_mat = generate_matrix(m, n, rng)
        signal = generate_signal(n, k, distribution, rng)
        report = overlap_report(signal, l1_minimize(a_mat, a_mat @ signal.values))
        fractions.append(report.overlap_fraction)
        margins.append(report.overlap_count - report.lemma1_lower_bound)
        l1_errors.append(report.l1_error)
    fractions = np.array(fractions)
    margins = np.array(margins)
    click.echo(f"trials: {trials}  (n={n}, m={m}, k={k}, "
               f"distribution={distribution})")
    click.echo(f"overlap fraction: mean {fractions.mean():.4f}  "
               f"min {fractions.min():.4f}")
    click.echo(f"bound margin    : mean {margins.mean():.2f}  "
               f"min {int(margins.min())}")
    click.echo(f"first-pass l1 error: mean {np.mean(l1_errors):.6g}")
    click.echo(f"bound violations: {int(np.sum(margins < 0))}")


if __name__ == "__main__":
    main()
