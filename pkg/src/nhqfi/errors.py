"""Exception hierarchy.  Each class carries the short ``code`` used in sweep tables."""


class EstimationError(ValueError):
    code = "ERROR"


class DimensionError(EstimationError):
    code = "DIMENSION"


class NotNormalizedError(EstimationError):
    code = "NOT_NORMALIZED"


class KCollapseError(EstimationError):
    """The evolved state has (numerically) zero norm."""

    code = "K_COLLAPSE"


class NonRealError(EstimationError):
    code = "NONREAL"


class NegativeQfiError(EstimationError):
    code = "NEGATIVE_QFI"


class InvalidPovmError(EstimationError):
    code = "INVALID_POVM"


class SingularOutcomeError(EstimationError):
    """An outcome with vanishing probability but non-vanishing derivative."""

    code = "SINGULAR_OUTCOME"


class NonHermitianMeasurementError(EstimationError):
    code = "NON_HERMITIAN_MEASUREMENT"


class DegenerateConditionError(EstimationError):
    code = "DEGENERATE"


class ZeroSignalError(EstimationError):
    """d<A>/dtheta vanishes, so the error-propagation variance diverges."""

    code = "ZERO_SIGNAL"


class RegimeError(EstimationError):
    code = "REGIME_MISMATCH"


class EPCoalescenceError(EstimationError):
    code = "EP_COALESCENCE"


class BrokenRegimeError(EstimationError):
    code = "BROKEN_REGIME"


class ZeroDenominatorError(EstimationError):
    code = "ZERO_DENOMINATOR"


class SpecError(EstimationError):
    code = "SPEC"
