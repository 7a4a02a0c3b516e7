"""Exception hierarchy shared by all engine modules."""


class EngineError(Exception):
    """Base class for all errors raised by suncolor."""


class ParseError(EngineError):
    """Input text does not conform to the expression grammar."""


class PoleError(EngineError, ZeroDivisionError):
    """Evaluation of a rational function at a zero of its denominator."""


class DegreeMismatchError(EngineError, ValueError):
    """Operation on symmetric-group objects of different degrees."""


class SignatureMismatchError(EngineError, ValueError):
    """Operation on tensor expressions with incompatible external signatures."""


class OrientationError(EngineError, ValueError):
    """Quark-line orientation clash while wiring a diagram."""


class ResourceLimitError(EngineError):
    """A configured expansion cap (terms, degree, bar width) was exceeded."""


class VerificationError(EngineError):
    """An internal exactness check failed (e.g. a projector is not idempotent)."""


class ConnectorNotFoundError(EngineError):
    """No non-vanishing connector exists within the fixed enumeration."""
