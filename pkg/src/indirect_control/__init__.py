"""Indirect controllability of a quantum system through an auxiliary system.

Computes the dynamical Lie algebra of a bipartite system, extracts the
system-side spaces K, P and L_S, decides indirect controllability, and
synthesizes verified steering unitaries.
"""
from .bipartite import StructureReport, structure_report
from .closure import ClosureError, DynamicalAlgebra, FullAlgebra, identify_full, lie_closure
from .kak import KAKError, kak_factorize
from .operators import DEFAULT_TOL, BipartiteSplit, Tolerance
from .steering import (
    ancilla_diagonalizer, build_complete_steering, build_steering, cartan_pair_from_structure,
    verify_steering,
)
from .subspace import SubspaceBasis
from .symmetric import validate_cartan_pair
from .verdict import DensityState, Verdict, VerdictResult, ad_orbit, decide, necessary_condition

__all__ = [
    "BipartiteSplit", "ClosureError", "DEFAULT_TOL", "DensityState", "DynamicalAlgebra",
    "FullAlgebra", "KAKError", "StructureReport", "SubspaceBasis", "Tolerance", "Verdict",
    "VerdictResult", "ad_orbit", "ancilla_diagonalizer", "build_complete_steering",
    "build_steering", "cartan_pair_from_structure", "decide", "identify_full", "kak_factorize",
    "lie_closure", "necessary_condition", "structure_report", "validate_cartan_pair",
    "verify_steering",
]
