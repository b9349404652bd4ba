"""Exact Reidemeister-Franz torsion of based chain complexes over Q."""

from .chain_complex import BasedChainComplex, HomologyData, HomologySplitting, homology, split, validate
from .exact_linalg import OrderedBasis, RationalMatrix, determinant, transition_determinant
from .torsion import TorsionValue, change_of_basis, reidemeister_torsion

__all__ = [
    "BasedChainComplex",
    "HomologyData",
    "HomologySplitting",
    "OrderedBasis",
    "RationalMatrix",
    "TorsionValue",
    "change_of_basis",
    "determinant",
    "homology",
    "reidemeister_torsion",
    "split",
    "transition_determinant",
    "validate",
]
