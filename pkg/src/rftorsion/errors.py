"""Exception hierarchy shared by every module."""


class TorsionError(ValueError):
    """Base class for all library errors."""


class NonSquareError(TorsionError):
    pass


class DimensionMismatchError(TorsionError):
    pass


class NotExpressibleError(TorsionError):
    """A vector does not lie in the span of the basis it is expressed in."""


class InvalidComplexError(TorsionError):
    pass


class InconsistentHomologyDataError(TorsionError):
    pass


class NotExactError(TorsionError):
    pass


class LiftFailureError(TorsionError):
    pass


class IncompatibleBasesError(TorsionError):
    pass


class NotOmegaCompatibleError(TorsionError):
    pass


class NonSquareDeterminantError(TorsionError):
    """A determinant that must be a rational square is not one."""


class UnknownModelError(TorsionError):
    pass


class MissingPairingsError(TorsionError):
    pass


class UnsupportedDimensionError(TorsionError):
    pass


class DegenerateStepError(TorsionError):
    pass


class InconsistentCorrespondenceError(TorsionError):
    pass


class DocumentSyntaxError(TorsionError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DocumentSemanticError(TorsionError):
    def __init__(self, message, degree=None):
        self.degree = degree
        super().__init__(message)
