"""Exception hierarchy shared by all modules."""


class KummerError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(KummerError, ValueError):
    """Invalid (p, N) input or argument outside an operation's domain."""


class ZeroInput(ValidationError):
    pass


class DegenerateModulus(ValidationError):
    """Leading coefficient of a polynomial vanishes mod N."""


class IndexOutOfRange(ValidationError):
    pass


class BadIndex(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class EvenExponent(ValidationError):
    """Regularity of an even eigenspace was requested; only odd classes are decided."""


class BadExponent(ValidationError):
    pass


class BadRange(ValidationError):
    pass


class MixedP(ValidationError):
    pass


class OracleBoundExceeded(KummerError):
    """An O(N^2) oracle was asked to run beyond its guard."""


class RootStatusMismatch(KummerError):
    """Conjugate roots of one polynomial disagree on pth-power status."""


class InvariantViolation(KummerError):
    """An internal consistency rule failed; indicates a bug, not bad input."""


class IoFailure(KummerError, OSError):
    pass


class ConfigMismatch(KummerError):
    """Resume attempted against a checkpoint written with a different config."""
