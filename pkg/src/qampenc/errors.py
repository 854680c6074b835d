"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` (CLI exit code 2);
broken internal invariants derive from :class:`InvariantError` (exit code 3).
"""


class QampencError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(QampencError, ValueError):
    pass


class InvariantError(QampencError, RuntimeError):
    pass


class ZeroVector(ValidationError):
    def __init__(self, msg="zero vector"):
        super().__init__(msg)


class UseComplexSplit(ValidationError):
    pass


class PrecisionTooLow(ValidationError):
    pass


class BadIndex(ValidationError, IndexError):
    pass


class BadShape(ValidationError):
    pass


class ImpossibleOutcome(ValidationError):
    pass


class BadParallelism(ValidationError):
    pass


class BadDensity(ValidationError):
    pass


class BadState(ValidationError):
    pass


class BadGrid(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class NotBranchable(ValidationError):
    """Circuit contains a gate the branch simulator cannot represent."""


class ParseError(ValidationError):
    def __init__(self, msg, offset=None):
        if offset is not None:
            msg = f"{msg} (at byte {offset})"
        super().__init__(msg)
        self.offset = offset


class UncomputeLeak(InvariantError):
    """Ancilla registers were not returned to |0> by the mirrored gates."""
