"""Integral mean curvatures, parallel bodies, lattice discrepancy and John
ellipsoids for ellipsoids and boxes, with independent numerical oracles."""

__version__ = "0.1.0"

from .bounds import (
    BoundInterval,
    TubePolynomial,
    parallel_area,
    parallel_volume,
    pinch_bounds,
    tube_area_bounds,
    tube_polynomial,
    tube_volume_bounds,
)
from .core import (
    Box,
    DimensionalConstants,
    Ellipsoid,
    ball,
    ellipsoid_from_matrix,
    ellipsoid_volume,
    make_ellipsoid,
    sphere_area,
    sym_elem,
    unit_ball_volume,
)
from .errors import (
    ConvergenceError,
    DegeneracyError,
    DomainError,
    GeometryError,
    NumericalError,
    ResourceError,
    SymmetryError,
)
from .grassmann import AffineFlat, HitEstimate, flat_hits_ellipsoid, hit_measure_ratio, sample_flat
from .john import JohnSandwich, MveeResult, john_sandwich, mvee
from .lattice import LatticeReport, lattice_count, lattice_discrepancy
from .measures import (
    ConvexBodyProbe,
    MeanCurvatures,
    Method,
    box_mean_curvatures,
    ellipsoid_mean_curvatures_quadrature,
    sphere_mean_curvatures,
    steiner_fit_mean_curvatures,
)

__all__ = [
    "AffineFlat",
    "BoundInterval",
    "Box",
    "ConvergenceError",
    "ConvexBodyProbe",
    "DegeneracyError",
    "DimensionalConstants",
    "DomainError",
    "Ellipsoid",
    "GeometryError",
    "HitEstimate",
    "JohnSandwich",
    "LatticeReport",
    "MeanCurvatures",
    "Method",
    "MveeResult",
    "NumericalError",
    "ResourceError",
    "SymmetryError",
    "TubePolynomial",
    "ball",
    "box_mean_curvatures",
    "ellipsoid_from_matrix",
    "ellipsoid_mean_curvatures_quadrature",
    "ellipsoid_volume",
    "flat_hits_ellipsoid",
    "hit_measure_ratio",
    "john_sandwich",
    "lattice_count",
    "lattice_discrepancy",
    "make_ellipsoid",
    "mvee",
    "parallel_area",
    "parallel_volume",
    "pinch_bounds",
    "sample_flat",
    "sphere_area",
    "sphere_mean_curvatures",
    "steiner_fit_mean_curvatures",
    "sym_elem",
    "tube_area_bounds",
    "tube_polynomial",
    "tube_volume_bounds",
    "unit_ball_volume",
]
