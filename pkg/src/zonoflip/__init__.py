"""Flip and Hamming distances between rhombus tilings of planar zonotopes."""

__version__ = "0.1.0"

from .core import PseudolineRef, SpecError, TriangleRef, ZonotopeSpec, total_triangles, triangle_table  # noqa: E402
from .space import (  # noqa: E402
    BudgetExceeded,
    count_tilings,
    deficiency_certificate,
    enumerate_space,
    flip_distance,
    greedy_reduce,
    hamming_distance,
    inverted_triangles,
)
from .tiling import Tiling, TilingError, flip, seed_tiling, validate  # noqa: E402

__all__ = [
    "BudgetExceeded",
    "PseudolineRef",
    "SpecError",
    "Tiling",
    "TilingError",
    "TriangleRef",
    "ZonotopeSpec",
    "count_tilings",
    "deficiency_certificate",
    "enumerate_space",
    "flip",
    "flip_distance",
    "greedy_reduce",
    "hamming_distance",
    "inverted_triangles",
    "seed_tiling",
    "total_triangles",
    "triangle_table",
    "validate",
]
