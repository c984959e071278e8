"""The 2-adic Weil representation on finite Schwartz spaces, exactly."""

from __future__ import annotations

from .groups import FiniteGroup, commutant_dim, ek_idempotence, group_closure, hecke_convolve
from .keylemma import key_lemma_verify
from .local import LocalField, archimedean_weil_index, square_class_transversal, weil_index
from .operators import (RepMatrix, WindowSpace, big_ek_value, check_char_relation, ek_value, epsilon_char,
                        epsilon_check, level_matrix, op_matrix, uflat_gauss_matrix)
from .words import MA, W, Inv, UFlat, USharp, WScaled, group_generators, in_group, word_matrix

__all__ = [
    "FiniteGroup", "commutant_dim", "ek_idempotence", "group_closure", "hecke_convolve",
    "key_lemma_verify",
    "LocalField", "archimedean_weil_index", "square_class_transversal", "weil_index",
    "RepMatrix", "WindowSpace", "big_ek_value", "check_char_relation", "ek_value", "epsilon_char",
    "epsilon_check", "level_matrix", "op_matrix", "uflat_gauss_matrix",
    "MA", "W", "Inv", "UFlat", "USharp", "WScaled", "group_generators", "in_group", "word_matrix",
]
