"""Exception hierarchy shared by every module."""


class OPHRLError(Exception):
    """Base class for all errors raised by the package."""


class ConfigurationError(OPHRLError):
    """A hierarchy, preset or experiment configuration is invalid."""


class ParameterError(OPHRLError, ValueError):
    """A numeric parameter is outside its allowed range."""


class AdmissibilityError(OPHRLError):
    """A value or action query was made where the task offers no actions."""


class EpisodeStructureError(OPHRLError):
    """The root task is not admissible at the state the executor was given."""


class HookError(OPHRLError):
    """A reward transformation produced a non-finite reward."""


class ContractViolation(OPHRLError):
    """A caller broke an operation's precondition."""


class NonConvergenceError(OPHRLError):
    """Value iteration ran out of iterations before reaching the tolerance."""

    def __init__(self, residual: float, iterations: int) -> None:
        super().__init__(
            f"value iteration did not converge after {iterations} iterations "
            f"(residual {residual:.3g})"
        )
        self.residual = residual
        self.iterations = iterations


class ExperimentError(OPHRLError):
    """A seed failed while running an experiment."""

    def __init__(self, seed: int, cause: BaseException) -> None:
        super().__init__(f"seed {seed} failed: {cause}")
        self.seed = seed
        self.cause = cause
