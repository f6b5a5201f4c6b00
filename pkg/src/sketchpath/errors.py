"""Exception types raised across the package."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DegenerateInput(GeometryError):
    pass


class PointInsidePolygon(GeometryError):
    pass


class PointInsideObstacle(GeometryError):
    pass


class PointNotOnBoundary(GeometryError):
    pass


class InvalidEpsilon(ValueError):
    pass


class NonConvexObstacle(GeometryError):
    """Raised by the convex pipeline; use the corridor pipeline instead."""


class InvalidInputPath(GeometryError):
    pass


class NodeNotFound(KeyError):
    pass


class Unreachable(RuntimeError):
    """No obstacle-avoiding path joins the two points."""


class StretchCertificationFailed(RuntimeError):
    def __init__(self, stretch: float, limit: float):
        super().__init__(f"sampled planar stretch {stretch:.6f} exceeds {limit:.6f}")
        self.stretch = stretch
        self.limit = limit


class DomainError(GeometryError):
    """A domain file failed validation; ``obstacle`` locates the offender."""

    def __init__(self, message: str, obstacle: int | None = None):
        super().__init__(message if obstacle is None else f"obstacle {obstacle}: {message}")
        self.obstacle = obstacle


class ParseError(DomainError):
    pass


class OverlappingObstacles(DomainError):
    def __init__(self, i: int, j: int):
        super().__init__(f"obstacles {i} and {j} overlap", obstacle=i)
        self.pair = (i, j)


class SelfIntersecting(DomainError):
    def __init__(self, i: int):
        super().__init__("polygon boundary self-intersects", obstacle=i)


class GenerationFailed(RuntimeError):
    pass


class IoError(OSError):
    """An output file could not be written."""
