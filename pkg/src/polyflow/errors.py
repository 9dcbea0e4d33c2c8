"""Exception hierarchy shared by every polyflow module."""


class PolyflowError(Exception):
    """Base class for all errors raised by polyflow."""


class FieldMismatch(PolyflowError, ValueError):
    """Two fields of different kind or size were combined."""


class NonPositiveLength(PolyflowError, ValueError):
    pass


class InadmissibleLengths(PolyflowError, ValueError):
    """Some edge length is not strictly below half the perimeter."""


class DuplicatePoints(PolyflowError, ValueError):
    pass


class CollinearPoints(PolyflowError, ValueError):
    pass


class CollinearPolygon(PolyflowError, ValueError):
    """The polygon lies on a line, i.e. it is a singular point of the shape space."""


class ConstraintViolation(PolyflowError, ValueError):
    """The polygon does not satisfy its edge-length / centering constraints."""


class ZeroEdge(PolyflowError, ValueError):
    pass


class NotCocyclic(PolyflowError, ValueError):
    pass


class NewtonDivergence(PolyflowError, ArithmeticError):
    """The length reprojection did not reach its tolerance within budget."""


class InitFailure(PolyflowError, RuntimeError):
    pass
