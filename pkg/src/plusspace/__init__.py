"""Exact plus-space coefficient maps and a 2-adic Weil representation engine."""

from __future__ import annotations

from .cyclotomic import CycScalar, conjugate, root_of_unity, to_complex
from .expansions import (FourierExpansion, JacobiExpansion, PlusExpansion, SplitFamily, compose_theta,
                         denormalize_jacobi_key, jacobi_of_plus, normalize_jacobi_key, plus_of_jacobi,
                         reassemble, rho_mA, rho_usharp, split_plus, theta_coeffs)
from .field import (RATIONAL, FieldElement, FieldSpec, additive_character_finite, embed_real,
                    is_totally_positive, real_quadratic, trace_to_Q)
from .numeric import eval_numeric, theta_transform_residual
from .symmat import HalfIntMatrix, SymMatrix, enumerate_psd, half_int, is_totally_psd, plus_support_witness

__version__ = "0.1.0"

__all__ = [
    "CycScalar", "conjugate", "root_of_unity", "to_complex",
    "FourierExpansion", "JacobiExpansion", "PlusExpansion", "SplitFamily", "compose_theta",
    "denormalize_jacobi_key", "jacobi_of_plus", "normalize_jacobi_key", "plus_of_jacobi", "reassemble",
    "rho_mA", "rho_usharp", "split_plus", "theta_coeffs",
    "RATIONAL", "FieldElement", "FieldSpec", "additive_character_finite", "embed_real", "is_totally_positive",
    "real_quadratic", "trace_to_Q",
    "eval_numeric", "theta_transform_residual",
    "HalfIntMatrix", "SymMatrix", "enumerate_psd", "half_int", "is_totally_psd", "plus_support_witness",
]
