"""Sparse recovery by two-step reweighted l1 minimization.

The package has three layers:

- recovery of individual signals: exact-equality basis pursuit on dense
  matrices (`l1_minimize`, `two_step_recover`, and the scikit-learn style
  `BasisPursuit` / `TwoStepBasisPursuit` estimators), backed by a
  self-contained dense simplex solver (`solve_lp`, `basis_pursuit`);
- asymptotic theory: the critical measurement ratio `delta_c` of weighted
  l1 minimization from combinatorial/internal/external angle exponents,
  the plain-l1 weak threshold `weak_threshold`, and the improvement check
  `theorem3_check`;
- experiments: a seeded Monte Carlo harness (`run_sweep`) that reproduces
  success-rate curves and 50% crossover points, plus a `rewl1` command
  line exposing all of the above.
"""
from .estimators import BasisPursuit, TwoStepBasisPursuit
from .harness import (
    ALGORITHMS,
    DISTRIBUTIONS,
    ExperimentConfig,
    KSummary,
    SweepResult,
    TrialRecord,
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
from .lp import (
    InfeasibleError,
    LinearProgram,
    LpSolution,
    SolverError,
    basis_pursuit,
    solve_lp,
)
from .recovery import (
    DISTRIBUTION_TAGS,
    OverlapReport,
    RecoveryOutcome,
    SparseSignal,
    k_support,
    l1_minimize,
    overlap_report,
    two_step_recover,
    w_of,
)
from .specialfn import (
    Bracket,
    ConvergenceError,
    OrderStatParams,
    binary_entropy,
    erf_scaled,
    find_root,
    gauss_density_scaled,
    gaussian_q,
    gaussian_q_inv,
    topmass_fraction,
    w_fraction_asymptotic,
)
from .thresholds import (
    DeltaCResult,
    ExponentBreakdown,
    ExponentIntermediates,
    RobustnessProfile,
    Theorem3Result,
    ThresholdQuery,
    ZetaBoundResult,
    constant_robustness_profile,
    delta_c,
    delta_c_details,
    exponent_breakdown,
    psi_com,
    psi_ext,
    psi_int,
    theorem3_check,
    threshold_csv_text,
    weak_threshold,
    write_threshold_csv,
    zeta_bound,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # specialfn
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
    # lp
    "LinearProgram",
    "LpSolution",
    "InfeasibleError",
    "SolverError",
    "solve_lp",
    "basis_pursuit",
    # recovery
    "SparseSignal",
    "RecoveryOutcome",
    "OverlapReport",
    "DISTRIBUTION_TAGS",
    "k_support",
    "l1_minimize",
    "two_step_recover",
    "w_of",
    "overlap_report",
    # thresholds
    "ThresholdQuery",
    "ExponentIntermediates",
    "ExponentBreakdown",
    "RobustnessProfile",
    "DeltaCResult",
    "Theorem3Result",
    "ZetaBoundResult",
    "psi_com",
    "psi_int",
    "psi_ext",
    "exponent_breakdown",
    "delta_c",
    "delta_c_details",
    "weak_threshold",
    "theorem3_check",
    "zeta_bound",
    "constant_robustness_profile",
    "write_threshold_csv",
    "threshold_csv_text",
    # harness
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
    # estimators
    "BasisPursuit",
    "TwoStepBasisPursuit",
]
