"""Metric geometry and maximal operators on infinite graphs."""

from .core_graph import (
    BallRecord, EmptySet, GraphError, GraphOracle, ResourceLimit, UnknownVertex,
    Unreachable, ball, distance, eccentricity_to_set, sphere,
)
from .families import FamilySpec, build, parse_family

__version__ = "0.1.0"

__all__ = [
    "BallRecord", "EmptySet", "FamilySpec", "GraphError", "GraphOracle", "ResourceLimit",
    "UnknownVertex", "Unreachable", "ball", "build", "distance", "eccentricity_to_set",
    "parse_family", "sphere",
]
