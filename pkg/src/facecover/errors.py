"""Exception hierarchy.

Everything raised on purpose by the package derives from ``FaceCoverError``.
``ValidationError`` covers bad input (the CLI maps it to exit code 1),
``SolverError`` covers numerical failures (exit code 2).
"""


class FaceCoverError(Exception):
    pass


class ValidationError(FaceCoverError, ValueError):
    pass


class SolverError(FaceCoverError, RuntimeError):
    pass


class DimensionMismatch(ValidationError):
    pass


class DegenerateSimplex(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class NegativeEpsilon(ValidationError):
    pass


class FaceNotContained(ValidationError):
    def __init__(self, message, face_index=None, distance=None):
        super().__init__(message)
        self.face_index = face_index
        self.distance = distance


class InvalidFamily(ValidationError):
    pass


class ContainmentViolated(ValidationError):
    def __init__(self, message, index=None, distance=None):
        super().__init__(message)
        self.index = index
        self.distance = distance


class NotACovering(ValidationError):
    pass


class HypothesisViolated(FaceCoverError):
    """A member of a face covering family is not at the common distance."""

    def __init__(self, alpha, distance, expected):
        super().__init__(
            f"set {alpha} is at distance {distance:.17g} from the equally "
            f"spaced point, expected {expected:.17g}"
        )
        self.alpha = alpha
        self.distance = distance
        self.expected = expected


class EnumerationCapExceeded(ValidationError):
    pass


class GridTooLarge(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class NonConvergence(SolverError):
    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class BisectionStalled(SolverError):
    def __init__(self, message, lower=None, upper=None, history=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.history = history or []
