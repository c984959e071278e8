"""Seeded generators for random test data (expansions and group elements)."""

from __future__ import annotations

import random
from fractions import Fraction

from .cyclotomic import CycScalar, root_of_unity
from .expansions import PlusExpansion
from .field import FieldElement, FieldSpec
from .symmat import enumerate_psd


def default_weight(field: FieldSpec, m: int) -> tuple[int, ...]:
    """Parallel weight 1 always satisfies the eta = -1 norm condition."""
    return (1,) * field.degree


def random_scalar(rng: random.Random) -> CycScalar:
    c = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
    if c == 0:
        c = Fraction(1)
    return root_of_unity(rng.randrange(8), 8) * c


_PLUS_KEYS: dict = {}


def plus_keys(field: FieldSpec, m: int, bound) -> list:
    """All plus-supported keys (eta = -1) of bounded trace."""
    key = (field, m, Fraction(bound))
    if key not in _PLUS_KEYS:
        _PLUS_KEYS[key] = list(enumerate_psd(field, m, bound, plus_eta=-1))
    return _PLUS_KEYS[key]


def random_plus_expansion(field: FieldSpec, m: int, bound, rng: random.Random,
                          terms: int = 8, weight=None) -> PlusExpansion:
    keys = plus_keys(field, m, bound)
    chosen = rng.sample(keys, min(terms, len(keys)))
    coeffs = {T: random_scalar(rng) for T in chosen}
    weight = weight or default_weight(field, m)
    return PlusExpansion(field, m, weight, coeffs, bound, -1)


def _random_element(field: FieldSpec, rng: random.Random, height: int) -> FieldElement:
    return field.coerce(tuple(rng.randint(-height, height) for _ in range(field.degree)))


def _identity(field, size):
    return [[field.one if i == j else field.zero for j in range(size)] for i in range(size)]


def _block(field, a, b, c, d):
    return [ra + rb for ra, rb in zip(a, b)] + [rc + rd for rc, rd in zip(c, d)]


def _matmul(a, b):
    size = len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(1, len(b))), a[i][0] * b[0][j]) for j in range(size)]
            for i in range(len(a))]


def random_sym(field: FieldSpec, m: int, rng: random.Random, height: int, scale=None):
    scale = field.one if scale is None else scale
    rows = [[field.zero] * m for _ in range(m)]
    for j in range(m):
        for k in range(j, m):
            x = _random_element(field, rng, height) * scale
            rows[j][k] = rows[k][j] = x
    return rows


def random_gl_integral(field: FieldSpec, m: int, rng: random.Random, height: int):
    """Product of an elementary matrix and a diagonal unit matrix."""
    units = field.units_sample()
    A = _identity(field, m)
    for j in range(m):
        A[j][j] = rng.choice(units)
    if m > 1:
        j, k = rng.sample(range(m), 2)
        E = _identity(field, m)
        E[j][k] = _random_element(field, rng, height)
        A = _matmul(A, E)
    return A


def random_gamma0_4(field: FieldSpec, m: int, rng: random.Random, height: int = 2, length: int = 3):
    """Random word in m(A), upper unipotents with b in d^-1 and lower with c in 4d."""
    delta = field.different_gen
    zero = [[field.zero] * m for _ in range(m)]
    one = _identity(field, m)
    g = _identity(field, 2 * m)
    for _ in range(rng.randint(1, length)):
        kind = rng.choice(("m", "u", "l"))
        if kind == "m":
            A = random_gl_integral(field, m, rng, height)
            Ainv_t = _inverse_t(field, A)
            h = _block(field, A, zero, zero, Ainv_t)
        elif kind == "u":
            B = random_sym(field, m, rng, height, delta.inverse())
            h = _block(field, one, B, zero, one)
        else:
            C = random_sym(field, m, rng, height, delta * 4)
            h = _block(field, one, zero, C, one)
        g = _matmul(g, h)
    return g


def _inverse_t(field, A):
    from .symmat import mat_inverse, transpose

    return transpose(mat_inverse(A))
