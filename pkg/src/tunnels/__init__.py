"""Recursive triangle and polygon tunnels: transforms, iteration, analysis."""

from .engine import Classification, StopCriteria, Termination, TunnelStep, TunnelTrace, classify, run
from .geometry import BaryCoords, Circle, Line, Point, Polygon, Tolerances, Triangle, make_figure
from .transforms import CATALOG, PointSpec, TransformSpec, apply

__all__ = [
    "BaryCoords", "CATALOG", "Circle", "Classification", "Line", "Point", "PointSpec", "Polygon",
    "StopCriteria", "Termination", "Tolerances", "TransformSpec", "Triangle", "TunnelStep",
    "TunnelTrace", "apply", "classify", "make_figure", "run",
]

__version__ = "0.1.0"
