"""Exact polytopes, smooth body models, affine surface areas and the
valuation checks built on them."""

from .bodies import Ball, BoundaryPoint, Ellipsoid, Piecewise2D, PolytopeBody, kappa_zero
from .errors import GeometryError
from .polytope import (
    LinearMap,
    Polytope,
    convex_hull,
    moment_vector_of_polar,
    polar,
    volume,
)
from .valuations import Composite, ConcFn, Oracle, decompose, evaluate

__all__ = [
    "Ball",
    "BoundaryPoint",
    "Composite",
    "ConcFn",
    "Ellipsoid",
    "GeometryError",
    "LinearMap",
    "Oracle",
    "Piecewise2D",
    "Polytope",
    "PolytopeBody",
    "convex_hull",
    "decompose",
    "evaluate",
    "kappa_zero",
    "moment_vector_of_polar",
    "polar",
    "volume",
]
