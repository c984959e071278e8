from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plusspace.cyclotomic import ONE, CycScalar, root_of_unity, sqrt2_power
from plusspace.expansions import (DuplicateWitness, InvalidExpansion, JacobiExpansion, NotPlusSupported,
                                  PlusExpansion, SplitFamily, UnsupportedDeterminant, compose_theta,
                                  denormalize_jacobi_key, jacobi_of_plus, normalize_jacobi_key, plus_of_jacobi,
                                  reassemble, rho_mA, rho_usharp, split_plus, theta_coeffs)
from plusspace.field import RATIONAL, real_quadratic
from plusspace.samples import random_plus_expansion
from plusspace.symmat import SymMatrix, half_int

Q, Q5 = RATIONAL, real_quadratic(5)


def M(rows, F=Q):
    return half_int(F, rows)


def plus(coeffs, m=1, F=Q, bound=20, weight=None):
    return PlusExpansion(F, m, weight or (1,) * F.degree, coeffs, bound, -1)


def test_normalize_examples():
    assert normalize_jacobi_key(M([[1]]), [2]) == (M([[0]]), (Q(0),))
    assert normalize_jacobi_key(M([[1]]), [1]) == (M([[3]]), (Q(1),))
    N = M([[1, Fraction(1, 2)], [Fraction(1, 2), 1]])
    assert normalize_jacobi_key(N, [1, 1]) == (M([[3, 1], [1, 3]]), (Q(1), Q(1)))


def test_denormalize_examples():
    assert denormalize_jacobi_key(M([[0]]), [0]) == (M([[0]]), (Q(0),))
    assert denormalize_jacobi_key(M([[3]]), [1]) == (M([[1]]), (Q(1),))
    N, r = denormalize_jacobi_key(M([[3, 1], [1, 3]]), [1, 1])
    assert N == M([[1, Fraction(1, 2)], [Fraction(1, 2), 1]])
    with pytest.raises(ValueError):
        denormalize_jacobi_key(M([[1]]), [0])


def test_shifted_raw_keys_agree():
    # (N, r) and (N + x r + x^2, r + 2x) encode the same Jacobi coefficient
    for x in range(-3, 4):
        N = M([[2 + x + x * x]])
        assert normalize_jacobi_key(N, [1 + 2 * x]) == normalize_jacobi_key(M([[2]]), [1])


def test_split_examples():
    fam = split_plus(plus({M([[3]]): ONE}))
    assert fam.components[(Q(1),)] == {M([[3]]): ONE}
    assert fam.components[(Q(0),)] == {}
    empty = split_plus(plus({}))
    assert all(not c for c in empty.components.values())
    with pytest.raises(NotPlusSupported) as err:
        split_plus(plus({M([[1]]): ONE}))
    assert "1" in str(err.value)


def test_jacobi_examples():
    T = M([[3, 1], [1, 3]])
    G = jacobi_of_plus(plus({T: ONE}, m=2))
    assert G.coeffs == {(T, (Q(1), Q(1))): ONE}
    assert G.weight == (2,)
    assert plus_of_jacobi(G) == plus({T: ONE}, m=2)
    assert len(jacobi_of_plus(plus({}))) == 0


def test_duplicate_witness_reported():
    # (4, 0) and ... two keys with the same T but different lambda cannot both satisfy the key law
    G = JacobiExpansion(Q, 1, (2,), {(M([[0]]), (Q(0),)): ONE}, 20, -1)
    assert plus_of_jacobi(G).coeffs == {M([[0]]): ONE}
    with pytest.raises(InvalidExpansion):
        JacobiExpansion(Q, 1, (2,), {(M([[3]]), (Q(0),)): ONE}, 20, -1)
    assert issubclass(DuplicateWitness, ValueError)


def test_theta_monomials():
    monos = theta_coeffs(Q, 1, [0], 4)
    assert sorted(mo.p[0].coords[0] for mo in monos) == [-2, -1, 0, 1, 2]
    assert all(mo.exponent.rows[0][0] == mo.p[0] * mo.p[0] and mo.r[0] == 2 * mo.p[0] for mo in monos)
    monos = theta_coeffs(Q, 1, [1], 1)
    assert sorted(mo.p[0].coords[0] for mo in monos) == [-1, 0]
    assert {mo.exponent.rows[0][0] for mo in monos} == {Q(Fraction(1, 4))}
    assert {mo.r[0] for mo in monos} == {Q(1), Q(-1)}


def test_compose_theta_of_constant():
    fam = SplitFamily(Q, 1, (1,), {(Q(0),): {M([[0]]): ONE}}, 20, -1)
    G = compose_theta(fam)
    assert G.coeffs == {(M([[0]]), (Q(0),)): ONE}
    assert len(compose_theta(SplitFamily(Q, 1, (1,), {}, 20, -1))) == 0


def test_rho_usharp_examples():
    h = plus({M([[3]]): ONE})
    assert rho_usharp(h, SymMatrix(Q, [[1]])).coeffs[M([[3]])] == ONE
    assert rho_usharp(h, SymMatrix(Q, [[Fraction(1, 4)]])).coeffs[M([[3]])] == root_of_unity(-3, 4)
    T = M([[3, 1], [1, 3]])
    h2 = plus({T: ONE}, m=2)
    S = SymMatrix(Q, [[Fraction(1, 4), 0], [0, 0]])
    assert rho_usharp(h2, S).coeffs[T] == root_of_unity(-3, 4)


def test_rho_ma_examples():
    h = plus({M([[4]]): ONE, M([[3]]): ONE})
    assert rho_mA(h, [[1]]).coeffs == h.coeffs
    out = rho_mA(h, [[2]])
    assert out.coeffs[M([[1]])] == sqrt2_power(-3)
    assert out.coeffs[SymMatrix(Q, [[Fraction(3, 4)]])] == sqrt2_power(-3)   # keys T -> T/4
    assert sqrt2_power(-3) == CycScalar.rational(Fraction(1, 4)) * sqrt2_power(1)
    with pytest.raises(UnsupportedDeterminant):
        rho_mA(h, [[3]])


def test_bad_construction_rejected():
    with pytest.raises(InvalidExpansion):
        plus({M([[1, 1], [1, 0]]): ONE}, m=2)          # not PSD
    with pytest.raises(InvalidExpansion):
        plus({M([[30]]): ONE})                          # beyond the trace bound
    with pytest.raises(InvalidExpansion):
        PlusExpansion(Q, 1, (2,), {}, 20, -1)           # eta norm condition fails for k = 2, m = 1


@pytest.mark.parametrize("F,m", [(Q, 1), (Q, 2), (Q5, 1), (Q5, 2)])
def test_round_trips(F, m):
    rng = random.Random(7)
    for _ in range(5):
        h = random_plus_expansion(F, m, 8, rng)
        G = jacobi_of_plus(h)
        assert plus_of_jacobi(G) == h
        assert jacobi_of_plus(plus_of_jacobi(G)) == G
        assert reassemble(split_plus(h)) == h
        assert compose_theta(split_plus(h)) == G


@given(st.integers(0, 30), st.integers(0, 30), st.integers(-30, 30))
def test_normalize_inverts_denormalize(a, d, b):
    N = M([[a, Fraction(b, 2)], [Fraction(b, 2), d]])
    for r in ([0, 0], [1, 0], [1, 1], [3, -2]):
        T, lam = normalize_jacobi_key(N, r)
        assert normalize_jacobi_key(*denormalize_jacobi_key(T, lam)) == (T, lam)


@given(st.integers(0, 10 ** 6))
def test_usharp_is_additive_in_s(seed):
    rng = random.Random(seed)
    h = random_plus_expansion(Q, 1, 12, rng)
    s1, s2 = Fraction(rng.randint(-7, 7), 8), Fraction(rng.randint(-7, 7), 4)
    S1, S2 = SymMatrix(Q, [[s1]]), SymMatrix(Q, [[s2]])
    assert rho_usharp(rho_usharp(h, S1), S2) == rho_usharp(h, SymMatrix(Q, [[s1 + s2]]))
