"""Linear on-policy control with per-feature step-size optimization.

Thin re-export of the compiled extension; see the C++ headers under
include/swiftsarsa/ for the full documentation.
"""

from _swiftsarsa import (  # noqa: F401
    CheckResult,
    CurvePoint,
    EnvConfig,
    Hyperparams,
    Learner,
    Observation,
    OperantEnv,
    PolicyKind,
    RunConfig,
    RunResult,
    RunSummary,
    SparseFeatures,
    StepDiagnostics,
    SweepGrid,
    SweepRow,
    action_decode,
    action_encode,
    checkpoint_from_json,
    checkpoint_to_json,
    csv_to_string,
    mu_update,
    oracle_policy_run,
    parse_csv,
    random_policy_run,
    read_csv,
    render_heatmap_svg,
    run_lifetime,
    run_sweep,
    run_verification,
    write_csv,
)

__all__ = [
    "CheckResult",
    "CurvePoint",
    "EnvConfig",
    "Hyperparams",
    "Learner",
    "Observation",
    "OperantEnv",
    "PolicyKind",
    "RunConfig",
    "RunResult",
    "RunSummary",
    "SparseFeatures",
    "StepDiagnostics",
    "SweepGrid",
    "SweepRow",
    "action_decode",
    "action_encode",
    "checkpoint_from_json",
    "checkpoint_to_json",
    "csv_to_string",
    "mu_update",
    "oracle_policy_run",
    "parse_csv",
    "random_policy_run",
    "read_csv",
    "render_heatmap_svg",
    "run_lifetime",
    "run_sweep",
    "run_verification",
    "write_csv",
]
