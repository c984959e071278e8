"""Instance checks of the induction behind the level-lifting lemma.

The abstract representation is instantiated as the Weil representation
itself with h_kappa = Phi_kappa^(0).  For a step i -> i+1 we verify the
hypotheses, the aggregation identity that rebuilds h^(e-i-1) from h^(e-i)
with u-sharp twists, and the u-flat action formula on h^(e-i-1) up to one
scalar xi with xi^8 = 1.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from ..cyclotomic import ONE, ZERO
from .local import LocalField
from .operators import epsilon_check
from .schwartz import LocalFunction, bilinear, phi_level, proportionality, quad_form
from .words import (UFlat, USharp, apply_word, group_generators, in_group, scaled_sym, word_matrix)


def _vec(F: LocalField, lam, n: int):
    return tuple(F.residue_rep(r, n) for r in lam)


def h_base(F: LocalField, m: int):
    """{kappa: h_kappa}, kappa in (o / 2o)^m."""
    return {lam: phi_level(F, m, 0, lam) for lam in itertools.product(range(F.q ** F.e), repeat=m)}


def h_aggregate(F: LocalField, m: int, base: dict, j: int, kappa) -> LocalFunction:
    """h^(j)_kappa = sum of h_lam over lam = kappa mod p^(e-j), kappa given mod p^(e-j)."""
    n = F.e - j
    kv = _vec(F, kappa, n)
    total = None
    for lam, h in base.items():
        lv = _vec(F, lam, F.e)
        if all(F.residue_index(x - y, n) == 0 for x, y in zip(lv, kv)):
            total = h if total is None else total + h
    return total


def diagonal_set(F: LocalField, m: int, k: int):
    """Diagonal matrices with entries in o / p^k."""
    for diag in itertools.product(F.residues(k), repeat=m):
        yield tuple(tuple(diag[r] if r == s else F.K.zero for s in range(m)) for r in range(m))


def sym_transversal(F: LocalField, m: int, k: int):
    """Symmetric matrices with entries in o / p^k."""
    slots = [(r, s) for r in range(m) for s in range(r, m)]
    for vals in itertools.product(F.residues(k), repeat=len(slots)):
        M = [[F.K.zero] * m for _ in range(m)]
        for (r, s), v in zip(slots, vals):
            M[r][s] = M[s][r] = v
        yield tuple(tuple(row) for row in M)


def check_hypotheses(F: LocalField, m: int, base: dict | None = None) -> dict:
    key = (F, m)
    if key not in _HYPOTHESES:
        _HYPOTHESES[key] = _check_hypotheses(F, m, base or h_base(F, m))
    return dict(_HYPOTHESES[key])


_HYPOTHESES: dict = {}


def _check_hypotheses(F: LocalField, m: int, base: dict) -> dict:
    """u#(B/delta) h_kappa = psi(tkappa B kappa / 4 delta) h_kappa, and sum h is an
    eigenvector of the level-e generators with eigenvalue check-epsilon^-1."""
    dinv = F.delta.inverse()
    eigen_ok = True
    for B in sym_transversal(F, m, 2 * F.e):
        word = (USharp(scaled_sym(F, B, dinv)),)
        for kappa, h in base.items():
            kv = _vec(F, kappa, F.e)
            expect = h.scale(F.psi(quad_form(kv, B) * (F.delta * 4).inverse()))
            if proportionality(apply_word(word, h), expect) != ONE:
                eigen_ok = False
    total = None
    for h in base.values():
        total = h if total is None else total + h
    char_ok = True
    for t in group_generators(F, m, "level", F.e):
        eps = epsilon_check((t,), F, m)
        if proportionality(apply_word((t,), total), total) != eps.inverse():
            char_ok = False
    return {"usharp_eigen": eigen_ok, "check_character": char_ok}


def aggregation_identity(F: LocalField, m: int, i: int, base: dict, kappa) -> bool:
    """h^(e-i-1)_kappa = q^-m(2i+1) sum_D psi(-tk D k/(delta varpi^(2i+1))) u#(4D/(delta varpi^(2i+1))) h^(e-i)_kappa."""
    k = 2 * i + 1
    denom = (F.delta * F.varpi_pow(k)).inverse()
    kv = _vec(F, kappa, i + 1)
    kappa_low = tuple(F.residue_index(x, i) for x in kv)
    h_hi = h_aggregate(F, m, base, F.e - i, kappa_low)
    lhs = h_aggregate(F, m, base, F.e - i - 1, kappa)
    rhs = None
    for D in diagonal_set(F, m, k):
        coef = F.psi(-quad_form(kv, D) * denom)
        term = apply_word((USharp(scaled_sym(F, D, denom * 4)),), h_hi).scale(coef)
        rhs = term if rhs is None else rhs + term
    rhs = rhs.scale(Fraction(1, F.q ** (m * k)))
    return proportionality(lhs, rhs) == ONE


def gamma_d_in_level(F: LocalField, m: int, i: int, S) -> bool:
    """gamma_D = u#(-4D/..) uflat(delta S) u#(4D/..) lies in Gamma^(e-i) for all D."""
    k = 2 * i + 1
    denom = (F.delta * F.varpi_pow(k)).inverse() * 4
    for D in diagonal_set(F, m, k):
        B = scaled_sym(F, D, denom)
        word = (USharp(scaled_sym(F, B, -1)), UFlat(scaled_sym(F, S, F.delta)), USharp(B))
        if not in_group(F, word_matrix(F, m, word), "level", F.e - i):
            return False
    return True


def target_identity(F: LocalField, m: int, i: int, base: dict, S):
    """uflat(delta S) h^(e-i-1)_kappa against the displayed Gauss-sum formula.

    Returns the common scalar xi, or None when the two sides are not
    proportional by one scalar for all kappa.
    """
    n = i + 1
    lin = (F.delta * F.varpi_pow(n)).inverse()
    quad = (F.delta * F.varpi_pow(2 * n)).inverse()
    idx = list(itertools.product(range(F.q ** n), repeat=m))
    vecs = {x: _vec(F, x, n) for x in idx}
    h_lo = {mu: h_aggregate(F, m, base, F.e - n, mu) for mu in idx}
    word = (UFlat(scaled_sym(F, S, F.delta)),)
    norm = Fraction(1, F.q ** (m * n))
    xi = None
    for kappa in idx:
        lhs = apply_word(word, h_lo[kappa])
        rhs = None
        for mu in idx:
            coef = ZERO
            for nu in idx:
                v = vecs[nu]
                arg = bilinear(v, vecs[kappa]) * lin - quad_form(v, S) * quad - bilinear(v, vecs[mu]) * lin
                coef = coef + F.psi(arg)
            if coef.is_zero():
                continue
            term = h_lo[mu].scale(coef * norm)
            rhs = term if rhs is None else rhs + term
        r = proportionality(lhs, rhs)
        if r is None or (xi is not None and r != xi):
            return None
        xi = r
    return xi


def key_lemma_verify(F: LocalField, m: int, i: int, S, details: bool = False):
    if not 0 <= i <= F.e - 1:
        raise ValueError(f"level step i must lie in [0, {F.e - 1}]")
    base = h_base(F, m)
    hyp = check_hypotheses(F, m, base)
    agg = all(aggregation_identity(F, m, i, base, kappa)
              for kappa in itertools.product(range(F.q ** (i + 1)), repeat=m))
    member = gamma_d_in_level(F, m, i, S)
    xi = target_identity(F, m, i, base, S)
    xi_ok = xi is not None and xi ** 8 == ONE
    ok = hyp["usharp_eigen"] and hyp["check_character"] and agg and member and xi_ok
    if details:
        return {"passed": ok, "hypotheses": hyp, "aggregation": agg, "gamma_d_membership": member,
                "xi": xi, "xi_eighth_root": xi_ok}
    return ok
