"""Exact constructions and checks for generalized skew Hadamard difference sets in abelian p-groups."""

from .checks import Check
from .conditions import (ab_conditions_check, ab_feasibility_search, alpha1_checks, build_L0, check_ab,
                         exponent_bound_report, lambda_matrix, power_coeffs)
from .cyclotomic import CyclotomicInt
from .galgebra import AlgebraElement, check_gshds, convolve, power_map
from .galois import make_field, make_ring, orbit_reps, paley_gshds
from .incidence import block_decompose, build_A, build_char_table, verify_A_square
from .pgroup import GroupSpec, make_group, orbit_tables, parse_group
from .qrs import character_dichotomy, diff_coeffs, exhaustive_search, is_gshds, qrs_decode, qrs_encode

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement", "Check", "CyclotomicInt", "GroupSpec",
    "ab_conditions_check", "ab_feasibility_search", "alpha1_checks", "block_decompose", "build_A",
    "build_L0", "build_char_table", "character_dichotomy", "check_ab", "check_gshds", "convolve",
    "diff_coeffs", "exhaustive_search", "exponent_bound_report", "is_gshds", "lambda_matrix",
    "make_field", "make_group", "make_ring", "orbit_reps", "orbit_tables", "paley_gshds",
    "parse_group", "power_coeffs", "power_map", "qrs_decode", "qrs_encode", "verify_A_square",
]
