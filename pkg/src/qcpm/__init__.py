"""Quasiperiodic point sets with a prescribed local motif.

Pipeline: a G-cluster (:mod:`qcpm.cluster`, :mod:`qcpm.presets`) fixes a
superspace splitting (:mod:`qcpm.superspace`); a shifted unit cube
(:mod:`qcpm.window`) selects lattice points, enumerated inside a ball by
:mod:`qcpm.patchgen` and examined by :mod:`qcpm.analysis`.
"""

from .cluster import GCluster, build_cluster
from .exactnum import FieldElement, parse_fe
from .patchgen import ModelSetPatch, generate_patch, naive_patch, neighbours
from .presets import PRESETS, preset, square_cluster
from .superspace import Classification, classify_projection, decompose
from .window import BoundaryAmbiguous, component_windows, make_window

__all__ = [
    "BoundaryAmbiguous",
    "Classification",
    "FieldElement",
    "GCluster",
    "ModelSetPatch",
    "PRESETS",
    "build_cluster",
    "classify_projection",
    "component_windows",
    "decompose",
    "generate_patch",
    "make_window",
    "naive_patch",
    "neighbours",
    "parse_fe",
    "preset",
    "square_cluster",
]
