"""Folding maps of surface germs: classification, versality and bifurcation sets."""

from .bifurcation import UnfoldingFamily, bi_germ_locus, mono_germ_locus, self_tangency_search, singular_points
from .errors import FoldAtlasError
from .folding import FoldDirection, build_folding_map, classify, geometric_report, rotation_unfolding_eval
from .jets import TruncatedPolynomial
from .surface import SurfaceGerm, UmbilicCubic, umbilic_classify
from .versality import codimension, is_versal_rotation, main_theorem_check

__all__ = [
    "FoldAtlasError",
    "FoldDirection",
    "SurfaceGerm",
    "TruncatedPolynomial",
    "UmbilicCubic",
    "UnfoldingFamily",
    "bi_germ_locus",
    "build_folding_map",
    "classify",
    "codimension",
    "geometric_report",
    "is_versal_rotation",
    "main_theorem_check",
    "mono_germ_locus",
    "rotation_unfolding_eval",
    "self_tangency_search",
    "singular_points",
    "umbilic_classify",
]
