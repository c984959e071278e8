"""Certificate routines over the local engine.

Each function returns a plain dict with a boolean ``passed`` plus enough
detail to say what was checked.  The CLI and the acceptance suite both call
these, so there is one implementation of every check.
"""

from __future__ import annotations

import random

from ..cyclotomic import ONE
from .groups import commutant_dim, ek_idempotence, group_closure, level_generator_images
from .keylemma import key_lemma_verify, sym_transversal
from .local import (LocalField, square_class_transversal, unit_transversal, weil_index,
                    weil_index_certificate)
from .operators import (big_ek_direct, big_ek_value, check_char_relation, epsilon_char, fourier_formula,
                        level_matrix, uflat_gauss_matrix, usharp_level_eigen)
from .schwartz import fourier, functions_equal, level_indices, phi_level
from .words import (UFlat, USharp, W, group_generators, in_group, random_integral_sym, random_word,
                    scaled_sym, word_matrix)


def level_tokens(F: LocalField, m: int, i: int) -> list:
    """Generators of Gamma^(i), plus w when it lies in the group."""
    toks = list(group_generators(F, m, "level", i))
    if in_group(F, word_matrix(F, m, (W(),)), "level", i):
        toks.append(W())
    return toks


def unitarity(F: LocalField, m: int, i: int) -> dict:
    bad = [t.to_json() for t in level_tokens(F, m, i) if not level_matrix(t, F, m, i).is_unitary()]
    return {"passed": not bad, "checked": len(level_tokens(F, m, i)), "failures": bad}


def usharp_eigen(F: LocalField, m: int, i: int) -> dict:
    """u#(delta^-1 varpi^2i B) on S^(i) is diagonal with the predicted entries, B mod p^2e."""
    scale = F.delta.inverse() * F.varpi_pow(2 * i)
    count, bad = 0, 0
    for B in sym_transversal(F, m, 2 * F.e):
        M = level_matrix(USharp(scaled_sym(F, B, scale)), F, m, i)
        want = usharp_level_eigen(F, m, i, B)
        count += 1
        if not M.is_diagonal() or [M.rows[j][j] for j in range(M.size)] != want:
            bad += 1
    return {"passed": bad == 0, "checked": count, "failures": bad}


def fourier_law(F: LocalField, m: int, i: int) -> dict:
    """Brute-force transform of every Phi_lambda^(i) against the closed formula."""
    bad = [list(lam) for lam in level_indices(F, m, i)
           if not functions_equal(fourier(phi_level(F, m, i, lam)), fourier_formula(F, m, i, lam))]
    return {"passed": not bad, "checked": len(level_indices(F, m, i)), "failures": bad}


def gauss_lemma(F: LocalField, m: int, i: int, S) -> dict:
    """level_matrix(uflat(delta S)) = xi * Gauss-sum matrix with xi^8 = 1."""
    M = level_matrix(UFlat(scaled_sym(F, S, F.delta)), F, m, i)
    xi = M.proportional_to(uflat_gauss_matrix(F, m, i, S))
    return {"passed": xi is not None and xi ** 8 == ONE, "xi": xi}


def random_sym_samples(F: LocalField, m: int, count: int, seed: int) -> list:
    rng = random.Random(seed)
    return [random_integral_sym(F, m, rng, 3) for _ in range(count)]


def random_words(F: LocalField, m: int, group: str, count: int, seed: int, i: int = 0) -> list:
    rng = random.Random(seed)
    return [random_word(F, m, group, rng, i) for _ in range(count)]


def character_laws(F: LocalField, m: int, count: int = 50, seed: int = 0) -> dict:
    """epsilon on Gamma_0(4): unit modulus and multiplicative on seeded pairs."""
    words = random_words(F, m, "gamma0_4", count, seed)
    values = [epsilon_char(w, F, m) for w in words]
    unit = all(v.is_unit_modulus() for v in values)
    mult = 0
    for j in range(count):
        a, b = words[j], words[(j + 1) % count]
        if epsilon_char(a + b, F, m) != values[j] * values[(j + 1) % count]:
            mult += 1
    return {"passed": unit and mult == 0, "unit_modulus": unit, "multiplicativity_failures": mult,
            "checked": count, "values": values}


def character_relation(F: LocalField, m: int, count: int = 50, seed: int = 0) -> dict:
    words = random_words(F, m, "level", count, seed, F.e)
    bad = sum(not check_char_relation(w, F, m) for w in words)
    return {"passed": bad == 0, "checked": count, "failures": bad}


def irreducibility(F: LocalField, m: int, i: int) -> dict:
    dim = commutant_dim(level_generator_images(F, m, i))
    return {"passed": dim == 1, "commutant_dim": dim}


def closure(F: LocalField, m: int, i: int = 0, cap: int = 100000):
    return group_closure(level_generator_images(F, m, i), cap)


def idempotence(F: LocalField, m: int, cap: int = 100000, words: int = 20, seed: int = 0) -> dict:
    """e^K * e^K = e^K on the closed level-0 image, and the two routes to E^K agree."""
    G = closure(F, m, 0, cap)
    res = ek_idempotence(G, F, m)
    bad = sum(big_ek_value(w, F, m) != big_ek_direct(w, F, m)
              for w in random_words(F, m, "conjugated", words, seed))
    res = dict(res)
    res["negative_identity"] = G.has_negative_identity()
    res["big_ek_failures"] = bad
    res["passed"] = res["passed"] and bad == 0
    return res


def key_lemma(F: LocalField, m: int, i: int, samples=None, seed: int = 0) -> dict:
    """Over the full transversal of S mod p^(2i+2) (samples=None) or seeded S."""
    if samples is None:
        Ss = list(sym_transversal(F, m, 2 * i + 2))
    else:
        Ss = random_sym_samples(F, m, samples, seed)
    results = [key_lemma_verify(F, m, i, S, details=True) for S in Ss]
    bad = [S for S, r in zip(Ss, results) if not r["passed"]]
    xis = sorted({repr(r["xi"]) for r in results})
    return {"passed": not bad, "checked": len(Ss), "failures": bad, "xi_values": xis}


def index_laws(F: LocalField) -> dict:
    """alpha^8 = 1, alpha(a b^2) = alpha(a), alpha(-a) = conj alpha(a), a over square classes and unit multiples."""
    reps = square_class_transversal(F)
    units = unit_transversal(F)
    points = list(reps) + [a * u for a in reps for u in units if u != F.K.one]
    eighth = all(weil_index(F, a) ** 8 == ONE for a in points)
    squares = all(weil_index(F, a * b * b) == weil_index(F, a) for a in reps for b in list(units) + [F.varpi])
    sign = all(weil_index(F, -a) == weil_index(F, a).conjugate() for a in points)
    stable = all(weil_index_certificate(F, a)["agrees_next"] for a in points)
    return {"passed": eighth and squares and sign and stable, "eighth_power": eighth,
            "square_invariance": squares, "negation": sign, "stabilized": stable,
            "checked": len(points), "values": {repr(a): weil_index(F, a) for a in reps}}
