"""Periodic perfect splines interpolating a smooth periodic function in
the mean, with the extremal bound ||s^(r)||_inf = |xi| <= ||f^(r)||_inf."""

from .errors import (
    AllZero,
    ConfigError,
    DegenerateLP,
    InfeasibleTargets,
    JumpPoint,
    KnotOrderViolation,
    MeanZeroViolation,
    NoConvergence,
    NullMultiplier,
    PersplineError,
    StalledLineSearch,
    StationarityResidual,
    TooManySignChanges,
)
from .kernels import BernoulliKernel, SmoothingKernel, WeightFunction
from .extremal import (
    LagrangeCertificate,
    L1Solution,
    MeanInterpolationProblem,
    assemble_basis,
    build_candidate,
    compute_targets,
    extract_knots,
    recover_certificate,
    solve_l1,
)
from .pipeline import (
    RunConfig,
    Tolerances,
    compile_function,
    run_plot,
    run_solve,
    solve_pipeline,
    verify_spline,
)
from .refine import KnotSystem, gauss_newton
from .spectral import (
    PeriodicFunction,
    SpectralGrid,
    convolve,
    count_sign_changes,
    derivative,
    evaluate,
    sup_norm,
)
from .spline import (
    PerfectSpline,
    alternating_knot_sum,
    PiecewiseOracle,
    eval_spline,
    spline_coefficients,
    step_spectrum,
    weighted_mean,
)

__all__ = [
    "AllZero",
    "BernoulliKernel",
    "ConfigError",
    "DegenerateLP",
    "InfeasibleTargets",
    "JumpPoint",
    "KnotOrderViolation",
    "KnotSystem",
    "L1Solution",
    "LagrangeCertificate",
    "MeanInterpolationProblem",
    "MeanZeroViolation",
    "NoConvergence",
    "NullMultiplier",
    "PerfectSpline",
    "PeriodicFunction",
    "PersplineError",
    "PiecewiseOracle",
    "RunConfig",
    "SmoothingKernel",
    "SpectralGrid",
    "StalledLineSearch",
    "StationarityResidual",
    "Tolerances",
    "TooManySignChanges",
    "WeightFunction",
    "alternating_knot_sum",
    "assemble_basis",
    "build_candidate",
    "compile_function",
    "compute_targets",
    "convolve",
    "count_sign_changes",
    "derivative",
    "eval_spline",
    "evaluate",
    "extract_knots",
    "gauss_newton",
    "recover_certificate",
    "run_plot",
    "run_solve",
    "solve_l1",
    "solve_pipeline",
    "spline_coefficients",
    "step_spectrum",
    "sup_norm",
    "verify_spline",
    "weighted_mean",
]
