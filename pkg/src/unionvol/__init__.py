"""Dynamic union-volume estimation over object oracles.

Estimators:
    DynamicUnionEstimator   fully dynamic insert/delete volume estimates
    SuffixStreamEstimator   insertion stream with suffix-union queries
    RangeReduction          lifts the bounded volume-window restriction
    ConvexStreamEstimator   low-space dynamic streaming for convex bodies
    MedianConvexEstimator   median of independent convex-stream copies

Objects are opaque oracles (size / sample / contains); see geometry for the
built-in shapes and truth for the exact references the benchmarks compare
against.
"""

from .convex import ConvexStreamEstimator, MedianConvexEstimator, ScaledBody
from .digest import DecrementalDigest, DigestConfig
from .dynamic import DynamicUnionEstimator
from .geometry import (AxisBox, Ball, DiscretePointSet, HalfspacePolytope,
                       ObjectOracle, Simplex, coverage_count, total_size)
from .klm import KlmConfig, klm_estimate
from .ranges import RangeReduction
from .sampling import level, make_rng, poisson
from .suffix import SuffixStreamEstimator
from .truth import (exact_box_union, exact_grid_count, exact_poly_union_2d,
                    mc_union_volume, union_truth)

__all__ = [
    "AxisBox", "Ball", "ConvexStreamEstimator", "DecrementalDigest",
    "DigestConfig", "DiscretePointSet", "DynamicUnionEstimator",
    "HalfspacePolytope", "KlmConfig", "MedianConvexEstimator",
    "ObjectOracle", "RangeReduction", "ScaledBody", "Simplex",
    "SuffixStreamEstimator", "coverage_count", "exact_box_union",
    "exact_grid_count", "exact_poly_union_2d", "klm_estimate", "level",
    "make_rng", "mc_union_volume", "poisson", "total_size", "union_truth",
]

__version__ = "0.1.0"
