"""Numerical laboratory for polarization-model bounds on multipartite
correlations, and for the quantum predictions that break them."""

from .geometry import (
    FRAME,
    FRAME_PRIMED,
    SettingsEnsemble,
    bipartite_settings,
    designated_triple,
    fig1_settings,
    frame_bound_margin,
    from_spherical,
    random_rotation,
    random_xy_settings,
    to_spherical,
    validate_ensemble,
    xy_plane_settings,
)
from .ghzform import (
    ghz_correlation_closed,
    ghz_correlation_vectors,
    ghz_correlator,
    ghz_reduced_correlation,
    tripartite_correlators,
)
from .ineq import (
    BOUND,
    MAX_VIOLATION,
    THETA0,
    THETA_STAR_MINUS,
    THETA_STAR_PLUS,
    CorrelatorContractError,
    InequalityAngles,
    TightPreconditionError,
    bipartite_average,
    evaluate_general,
    evaluate_tight,
    general_bounds,
    minform_lhs,
    peak_profile,
    shared_settings_form,
    tripartite_ghz_closed,
)
from .optim import (
    OptimumReport,
    ScanGrid,
    grid_scan,
    maximize_violation,
    optimal_locus,
    surface,
)
from .oracle import (
    CorrelatorSet,
    HiddenVariableEnsemble,
    LeggettHiddenVariable,
    ModelSoundnessError,
    ensemble_inequality_check,
    hadamard_matrix,
    identity_check,
    inadmissible_counterexample,
    model_gamma,
    product_correlators,
    random_ensemble,
    sample_admissible,
    verify_constraint_chain,
    walsh_hadamard,
)
from .qcore import (
    DensityMatrix,
    correlation_bruteforce,
    ghz_density,
    partial_trace,
    pauli_dot,
)
from .rng import DEFAULT_SEED, SEED_ENV_VAR, make_rng, resolve_seed, sphere_points

__version__ = "0.1.0"

__all__ = [
    "BOUND",
    "DEFAULT_SEED",
    "FRAME",
    "FRAME_PRIMED",
    "MAX_VIOLATION",
    "SEED_ENV_VAR",
    "THETA0",
    "THETA_STAR_MINUS",
    "THETA_STAR_PLUS",
    "CorrelatorContractError",
    "CorrelatorSet",
    "DensityMatrix",
    "HiddenVariableEnsemble",
    "InequalityAngles",
    "LeggettHiddenVariable",
    "ModelSoundnessError",
    "OptimumReport",
    "ScanGrid",
    "SettingsEnsemble",
    "TightPreconditionError",
    "bipartite_average",
    "bipartite_settings",
    "correlation_bruteforce",
    "designated_triple",
    "ensemble_inequality_check",
    "evaluate_general",
    "evaluate_tight",
    "fig1_settings",
    "frame_bound_margin",
    "from_spherical",
    "general_bounds",
    "ghz_correlation_closed",
    "ghz_correlation_vectors",
    "ghz_correlator",
    "ghz_density",
    "ghz_reduced_correlation",
    "grid_scan",
    "hadamard_matrix",
    "identity_check",
    "inadmissible_counterexample",
    "make_rng",
    "maximize_violation",
    "minform_lhs",
    "model_gamma",
    "optimal_locus",
    "partial_trace",
    "pauli_dot",
    "peak_profile",
    "product_correlators",
    "random_ensemble",
    "random_rotation",
    "random_xy_settings",
    "resolve_seed",
    "sample_admissible",
    "shared_settings_form",
    "sphere_points",
    "surface",
    "to_spherical",
    "tripartite_correlators",
    "tripartite_ghz_closed",
    "validate_ensemble",
    "verify_constraint_chain",
    "walsh_hadamard",
    "xy_plane_settings",
]
