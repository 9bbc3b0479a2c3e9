"""
Error hierarchy shared by the library and the command-line harness.
"""


class MajorityError(Exception):
    pass


class GraphConstructionError(MajorityError, ValueError):
    pass


class FormatError(MajorityError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ColouringInputError(MajorityError, ValueError):
    pass


class WeightError(MajorityError, ValueError):
    pass


class TraceMismatchError(MajorityError, ValueError):
    pass


class PreconditionError(MajorityError):
    """
    Raised when the hypotheses of the requested construction do not hold for the input.
    """


class SizeGuardError(PreconditionError):
    pass


class InternalInvariantError(MajorityError):
    """
    Raised when a produced object fails its own certification.
    Seeing this means either a bug or a breach of a theorem's hypotheses.
    """


class SelectorExhaustedError(InternalInvariantError):
    pass
