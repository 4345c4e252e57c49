"""Exception hierarchy shared by every layer."""


class GenGraphError(Exception):
    """Base class for library errors."""


class SpecError(GenGraphError, ValueError):
    """Malformed group or tower specification."""


class CapExceeded(GenGraphError):
    """A computation would exceed a configured size cap."""


class PreconditionError(GenGraphError, ValueError):
    """Caller violated an operation's precondition."""


class UnsupportedGroup(GenGraphError, TypeError):
    """Operation is only defined for particular group families."""


class LemmaViolation(GenGraphError, AssertionError):
    """A computation contradicted a proven statement.

    Never caught inside the library: it must surface loudly.
    """


class ParityObstruction(GenGraphError, ValueError):
    """A walk of the requested length cannot exist."""


class LiftNotFound(GenGraphError):
    """No in-coset replacement exists for a non-normal subgroup (a genuine finite phenomenon)."""
