"""Exception types raised by the solver pipeline.

Each carries a machine-readable ``code`` so the CLI can map failures to
exit codes and report entries without string matching.
"""


class PersplineError(Exception):
    code = "error"


class AllZero(PersplineError):
    """Every sample of the function is below the zero tolerance."""

    code = "all_zero"


class JumpPoint(PersplineError):
    """Evaluation of a discontinuous kernel at its jump point."""

    code = "jump_point"


class InfeasibleTargets(PersplineError):
    """All targets equal: the normalization constraints are jointly infeasible."""

    code = "infeasible_targets"


class DegenerateLP(PersplineError):
    """The linear program failed to return an optimal vertex."""

    code = "degenerate_lp"


class StationarityResidual(PersplineError):
    """The recovered multiplier system has a residual too large to trust."""

    code = "stationarity_residual"


class NullMultiplier(PersplineError):
    """A multiplier that must be nonzero vanished after normalization."""

    code = "null_multiplier"


class TooManySignChanges(PersplineError):
    """The optimal integrand alternates more often than the knot budget allows."""

    code = "too_many_sign_changes"


class MeanZeroViolation(PersplineError):
    """Alternating knot-interval sum too far from zero for a periodic spline."""

    code = "mean_zero_violation"


class KnotOrderViolation(PersplineError):
    """Knot sequence is not strictly increasing within one period."""

    code = "knot_order_violation"


class NoConvergence(PersplineError):
    """Iterative refinement did not reach the requested residual."""

    code = "no_convergence"


class StalledLineSearch(PersplineError):
    """Damped step could not decrease the residual norm."""

    code = "stalled_line_search"


class ConfigError(PersplineError):
    """Invalid run configuration or input file."""

    code = "config_error"
