"""Certified enclosures for the first Dirichlet eigenvalue of regular polygons.

The package computes rigorous two-sided bounds on the fundamental Dirichlet
Laplacian eigenvalue of the regular N-gon of area pi, for every N >= 3, and
verifies that both the eigenvalue and its consecutive ratio decrease strictly
in N.  Everything downstream of the interval layer is validated numerics:
each returned interval is a mathematical enclosure, not an estimate.
"""

from polyspec.interval import (
    BranchCutOverlap,
    ComplexBox,
    DivisionByZeroInterval,
    DomainError,
    EmptyIntersection,
    Precision,
    RealInterval,
    cbox,
    get_precision,
    iv,
    iv_pm,
    precision,
    set_precision,
)

__version__ = "0.1.0"

__all__ = [
    "RealInterval",
    "ComplexBox",
    "Precision",
    "iv",
    "iv_pm",
    "cbox",
    "get_precision",
    "set_precision",
    "precision",
    "DivisionByZeroInterval",
    "EmptyIntersection",
    "DomainError",
    "BranchCutOverlap",
    "__version__",
]
