"""Nested spatially-coupled LDPC codes from array-based matrices with 6-cycle optimisation."""

from .abmatrix import ABMatrixSpec, build_ab, default_nested_rows, extract_nested, weight3_cover
from .census import CycleReport, count_6cycles, list_6cycles, mu_decomposition
from .coupling import LiftAssignment, SCCodeSpec, SpreadingMatrix, assemble_sc, split_components
from .gf2 import BinaryMatrix, CirculantGrid, expand, rank_gf2

__all__ = [
    "ABMatrixSpec",
    "BinaryMatrix",
    "CirculantGrid",
    "CycleReport",
    "LiftAssignment",
    "SCCodeSpec",
    "SpreadingMatrix",
    "assemble_sc",
    "build_ab",
    "count_6cycles",
    "default_nested_rows",
    "expand",
    "extract_nested",
    "list_6cycles",
    "mu_decomposition",
    "rank_gf2",
    "split_components",
    "weight3_cover",
]
