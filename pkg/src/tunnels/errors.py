"""Exception hierarchy.

Every construction failure is a :class:`GeometryError`; the tunnel engine
catches these and records them as a degenerate termination, so callers of
``run`` never see them raised.
"""


class TunnelError(Exception):
    """Base class for all package errors."""


class GeometryError(TunnelError, ValueError):
    """A construction is undefined for the given figure."""


class NonFiniteCoordinate(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class ParallelLines(GeometryError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class DegeneratePolygon(GeometryError):
    pass


class PointAtInfinity(GeometryError):
    pass


class RightAngleDegenerate(GeometryError):
    pass


class FootAtInfinity(GeometryError):
    pass


class VertexAtInfinity(GeometryError):
    pass


class SimsonDegenerate(GeometryError):
    """Pedal feet are collinear (the point lies on the circumcircle)."""


class CevianCircleMiss(GeometryError):
    pass


class NotInterior(GeometryError):
    pass


class NotConcurrent(GeometryError):
    """Cevians that should concur by construction miss each other."""


class ConcurrentNedians(GeometryError):
    pass


class RayMissesSide(GeometryError):
    def __init__(self, vertex: str, message: str = ""):
        self.vertex = vertex
        super().__init__(message or f"nedian ray from {vertex} misses the opposite side")


class FootOutsideSide(GeometryError):
    def __init__(self, indices, message: str = ""):
        self.indices = tuple(indices)
        super().__init__(message or f"feet outside their sides at vertices {list(self.indices)}")


class ArityMismatch(GeometryError):
    pass


class InvalidSpec(TunnelError, ValueError):
    """A TransformSpec, StopCriteria or run configuration is malformed."""


class InvalidGrid(TunnelError, ValueError):
    pass


class IoFailure(TunnelError, OSError):
    pass
