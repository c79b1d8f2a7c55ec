"""Exception hierarchy.

``PreconditionError`` subclasses signal a mathematical precondition failure
(singular matrix, automorphism not moving to infinity, ...); the CLI maps
them to exit code 1. ``ParseError`` maps to exit code 2.
"""


class PreconditionError(ValueError):
    pass


class ContextMismatchError(PreconditionError):
    pass


class SingularMatrixError(PreconditionError):
    pass


class ZeroScaleError(PreconditionError):
    """The automorphism does not move to infinity (scale exponent 0)."""


class EmptyRangeError(PreconditionError):
    """No admissible ``k`` in the minimisation defining delta_n."""


class UnsupportedSubgroupError(PreconditionError):
    pass


class ParseError(ValueError):
    def __init__(self, message, text="", position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
