"""Semantic exception hierarchy shared by all rgflow modules."""


class RgflowError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RgflowError, ValueError):
    """Scalar argument outside its mathematical domain."""


class DimensionMismatch(RgflowError, ValueError):
    """Vector arguments whose shapes do not line up."""


class SingularTime(RgflowError, ArithmeticError):
    """Generation-time velocity requested at g <= 0 where it is undefined."""


class SingularStart(RgflowError, ArithmeticError):
    """Hybrid update requested from g1 = 0 where k = sin(g2)/sin(g1) diverges."""


class ConfigError(RgflowError, ValueError):
    """Inconsistent sampler/training configuration."""


class EmptyDataset(RgflowError, ValueError):
    """An operation received a dataset with no samples."""


class InsufficientData(RgflowError, ValueError):
    """Too few samples for the requested statistic."""


class DegenerateState(RgflowError, ArithmeticError):
    """Observation model carries no information about the target."""


class NonFiniteLoss(RgflowError, FloatingPointError):
    """Training loss became NaN/Inf; message carries step diagnostics."""


class CheckFailure(RgflowError):
    """A verification check did not meet its tolerance."""
