"""Exception types raised by the realization routines."""


class NcSchurError(ValueError):
    """Base class for all errors raised by this package."""


class DimensionError(NcSchurError):
    """Block shapes of the operands do not fit together."""


class NotContractiveError(NcSchurError):
    """An operator, pair or multiplier fails the contractivity test."""


class StabilityError(NcSchurError):
    """A tuple is not strongly stable where strong stability is required."""


class ConvergenceError(NcSchurError):
    """A fixed-point iteration did not reach its residual target."""


class SingularGramianError(NcSchurError):
    """A gramian is numerically singular (pair not exactly controllable)."""


class NotObservableError(NcSchurError):
    """The truncated observability matrix does not have full column rank."""


class KernelMismatchError(NcSchurError):
    """Two kernels that must coincide differ beyond tolerance."""


class RankCollapseError(NcSchurError):
    """The model state space is trivial but the series is not constant."""


class NotCoisometricError(NcSchurError):
    """A colligation that must be coisometric fails ``||U U^* - I|| <= tol``."""
