"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Base class for every error raised by cvgeom."""


# exact geometry
class DegenerateInput(GeometryError):
    pass


class OriginNotInterior(GeometryError):
    pass


class InvalidSplit(GeometryError):
    pass


class NoIntersection(GeometryError):
    pass


class SingularMatrix(GeometryError):
    pass


class ClassViolation(GeometryError):
    pass


class EmptyDirections(GeometryError):
    pass


# smooth bodies
class InvalidBody(GeometryError):
    pass


class ParamOutOfDomain(GeometryError):
    pass


class NonSmoothPoint(GeometryError):
    pass


class QuadratureNoConvergence(UserWarning):
    """Issued (not raised) when an adaptive rule exhausts its panel budget."""


# valuations
class InvalidConcFn(GeometryError):
    pass


class NotUnimodular(GeometryError):
    pass


class ZeroBaseline(GeometryError):
    pass


class SingularFittingSystem(GeometryError):
    pass


class NotConverging(GeometryError):
    pass


class UnionNotConvex(GeometryError):
    pass


# functional-equation lab
class InsufficientTriples(GeometryError):
    pass


class NotEven(GeometryError):
    pass


class FitDegenerate(GeometryError):
    pass


class PreconditionViolated(GeometryError):
    pass


# cli
class UnknownSuite(GeometryError):
    pass
