"""Local solvability, Brauer-Manin obstructions and point counts for ternary quadrics."""

from .arith import factorize, jacobi, kronecker, moebius, sqrt_mod
from .brauer import (
    BrauerDecomposition,
    Obstruction,
    brauer_decomposition,
    evaluate_invariant,
    family_invariant_profile,
    has_rational_point,
    hilbert_symbol,
    integral_point_search,
    obstruction_decision,
)
from .census import (
    CharacterTable,
    coprime_triple_count,
    count_nbr_characters,
    count_nbr_direct,
    count_nbr_mobius,
    count_nloc,
    decompose_triple,
)
from .constants import constant_D, constant_E, dirichlet_L1, euler_C, euler_C_f
from .local import (
    FamilyInstance,
    LocalVerdict,
    QuadricInstance,
    family_local_criterion,
    residue_search,
    solvable_at_prime,
    solvable_everywhere,
)

__version__ = "0.1.0"

__all__ = [
    "BrauerDecomposition", "CharacterTable", "FamilyInstance", "LocalVerdict", "Obstruction",
    "QuadricInstance", "brauer_decomposition", "constant_D", "constant_E", "coprime_triple_count",
    "count_nbr_characters", "count_nbr_direct", "count_nbr_mobius", "count_nloc",
    "decompose_triple", "dirichlet_L1", "euler_C", "euler_C_f", "evaluate_invariant", "has_rational_point",
    "factorize", "family_invariant_profile", "family_local_criterion", "hilbert_symbol",
    "integral_point_search", "jacobi", "kronecker", "moebius", "obstruction_decision",
    "residue_search", "solvable_at_prime", "solvable_everywhere", "sqrt_mod",
]
