"""Forgery analysis for arbitrated quantum signature schemes.

Decides which assistant unitaries admit receiver forgeries, builds checkable
forgery witnesses, replays attacks against the protocol, and cross-checks
the classification with a brute-force search.
"""

from .errors import ContractViolation, InconsistencyError, UnsupportedInput
from .forgery import (
    ForgeryWitness,
    SchemeSpec,
    SearchResult,
    brute_force_search,
    classify_three_rotation,
    conjugation,
    construct_three_rotation_witness,
    deviation,
    find_two_rotation_witness,
    lemma1_filter,
)
from .pauliparam import PRESETS, PauliCoeffs, abg, classify, coeffs_to_matrix, haar_sample, matrix_to_coeffs

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "ContractViolation",
    "ForgeryWitness",
    "InconsistencyError",
    "PauliCoeffs",
    "SchemeSpec",
    "SearchResult",
    "UnsupportedInput",
    "abg",
    "brute_force_search",
    "classify",
    "classify_three_rotation",
    "coeffs_to_matrix",
    "conjugation",
    "construct_three_rotation_witness",
    "deviation",
    "find_two_rotation_witness",
    "haar_sample",
    "lemma1_filter",
    "matrix_to_coeffs",
]
