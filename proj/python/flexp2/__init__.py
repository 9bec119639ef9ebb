"""Coupled nonnegative PARAFAC2 decompositions."""

from flexp2._core import (
    Error,
    Parafac2Factors,
    RaggedTensor,
    RunReport,
    SolverConfig,
    SynthGroundTruth,
    SynthSpec,
    Termination,
    align_columns,
    fit_residuals,
    gen_A,
    gen_C,
    gen_dataset,
    gen_shifted_B,
    initial_factors,
    khatri_rao,
    load_p2rt,
    load_truth,
    nnls,
    normalize_columns,
    procrustes,
    reconstruct_slice,
    relative_B_error,
    relative_fit,
    run_classic,
    run_flexible,
    save_p2rt,
    save_truth,
    validate,
    validate_config,
)

__all__ = [
    "Error",
    "Parafac2Factors",
    "RaggedTensor",
    "RunReport",
    "SolverConfig",
    "SynthGroundTruth",
    "SynthSpec",
    "Termination",
    "align_columns",
    "fit_residuals",
    "gen_A",
    "gen_C",
    "gen_dataset",
    "gen_shifted_B",
    "initial_factors",
    "khatri_rao",
    "load_p2rt",
    "load_truth",
    "nnls",
    "normalize_columns",
    "procrustes",
    "reconstruct_slice",
    "relative_B_error",
    "relative_fit",
    "run_classic",
    "run_flexible",
    "save_p2rt",
    "save_truth",
    "validate",
    "validate_config",
]
