"""Exact-arithmetic toolkit for strong homotopy algebras and their derivations."""

from .graded import (
    GradedVector,
    GradedVectorSpace,
    MultilinearMap,
    compose_at,
    desuspend_map,
    map_sigma_act,
    suspend_map,
    symmetry_defect,
)
from .homotopy_assoc import AInfinityStructure, SHDerivationA
from .homotopy_lie import LInfinityStructure, SHDerivationL
from .signs import Permutation, koszul_sign, sgn, unshuffles

__version__ = "0.1.0"

__all__ = [
    "AInfinityStructure",
    "GradedVector",
    "GradedVectorSpace",
    "LInfinityStructure",
    "MultilinearMap",
    "Permutation",
    "SHDerivationA",
    "SHDerivationL",
    "compose_at",
    "desuspend_map",
    "koszul_sign",
    "map_sigma_act",
    "sgn",
    "suspend_map",
    "symmetry_defect",
    "unshuffles",
    "__version__",
]
