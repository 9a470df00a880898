"""Exception kinds shared across the package.

Every error carries a machine-readable ``kind`` string that the CLI
surfaces in JSON error output.
"""


class RestrictaError(Exception):
    kind = "error"


class CapExceeded(RestrictaError):
    """A configured size cap (enumeration, matrix dimension, scan) was hit."""

    kind = "cap-exceeded"


class LimitExceeded(RestrictaError):
    """Requested sieve limit above the supported range."""

    kind = "limit-exceeded"


class OutOfRange(RestrictaError):
    """Query exceeds the range a table was built for."""

    kind = "out-of-range"


class WrongShape(RestrictaError):
    """Operation requires a digit set of a specific shape (e.g. one missing digit)."""

    kind = "wrong-shape"


class NotReached(RestrictaError):
    """A scan hit its cap before the target condition; carries the cap."""

    kind = "not-reached"

    def __init__(self, cap, message=None):
        self.cap = cap
        super().__init__(message or f"target not reached by cap {cap}")


class FactorizationTooHard(RestrictaError):
    """Exact divisor enumeration refused: unfactored composite cofactor."""

    kind = "factorization-too-hard"


class Unsupported(RestrictaError):
    """Operation defined only for a restricted input family."""

    kind = "unsupported"


class UsageError(RestrictaError):
    kind = "usage-error"
