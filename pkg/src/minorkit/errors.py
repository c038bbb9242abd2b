"""Exception hierarchy shared by every minorkit module."""


class MinorkitError(Exception):
    pass


class MalformedTableError(MinorkitError, ValueError):
    """An operation table has the wrong length or an out-of-range entry."""


class SignatureMismatchError(MinorkitError, ValueError):
    pass


class SizeOverflowError(MinorkitError, ValueError):
    """A power or product would exceed the configured carrier cap."""


class LimitExceededError(MinorkitError, RuntimeError):
    """An enumeration found more results than the caller allowed."""


class CapExceededError(MinorkitError, ValueError):
    """An input is larger than a hard cap (partition lattice order, poset size, ...)."""


class NotADistributiveLatticeError(MinorkitError, ValueError):
    pass


class ArityTooSmallError(MinorkitError, ValueError):
    pass


class EmptySplitError(MinorkitError, ValueError):
    pass


class PreconditionError(MinorkitError, ValueError):
    pass


class PatternMismatchError(MinorkitError, ValueError):
    pass


class ParseError(MinorkitError, ValueError):
    pass
