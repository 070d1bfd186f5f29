"""Exception hierarchy for the surfree package."""


class SurFreeError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateFrame(SurFreeError):
    """The two anchor points coincide or the side direction is not orthonormal."""


class UndefinedAtThetaZero(SurFreeError):
    """The half-space test has no meaning at angle zero."""


class DegenerateQuadratic(SurFreeError):
    """The three distance samples are collinear; no quadratic vertex exists."""


class ShapeError(SurFreeError):
    """Tensor shape incompatible with the requested transform."""


class AllZeroDraw(SurFreeError):
    """Every sampled coefficient was zero, repeatedly."""


class DegenerateDirection(SurFreeError):
    """Candidate direction lies in the span of the current frame and window."""


class NotAdversarialSeed(SurFreeError):
    """Segment endpoint expected to be adversarial is not."""


class BudgetExhausted(SurFreeError):
    """The oracle query budget ran out."""


class InitializationFailed(SurFreeError):
    """No adversarial starting point found within the initial trial budget."""


class NotMisclassifiedOriginal(SurFreeError):
    """The original input is already assigned a different label."""


class RunStuck(SurFreeError):
    """Direction sampling degenerated repeatedly; the search space is exhausted."""


class TransportError(SurFreeError):
    """Remote oracle unreachable or timed out."""


class ProtocolError(SurFreeError):
    """Remote oracle answered with a malformed payload."""


class RemoteError(SurFreeError):
    """Remote oracle answered with a non-success status."""


class BindError(SurFreeError):
    """Could not bind the requested address."""


class LengthMismatch(SurFreeError):
    """Curves of different lengths cannot be aggregated."""


class EmptySet(SurFreeError):
    """Statistic requested over an empty collection."""


class ConfigError(SurFreeError):
    """Invalid run manifest or configuration value."""
