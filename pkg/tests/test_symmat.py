from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plusspace.field import RATIONAL, real_quadratic
from plusspace.symmat import (NotHalfIntegral, SymMatrix, enumerate_psd, half_int, in_4L_dual, is_totally_psd,
                              outer, plus_support_witness, plus_witnesses, residue_vectors)

Q, Q5 = RATIONAL, real_quadratic(5)


def M(rows, F=Q):
    return half_int(F, rows)


def test_psd_examples():
    assert is_totally_psd(M([[0, 0], [0, 0]]))
    assert is_totally_psd(M([[3, 1], [1, 3]]), strict=True)
    assert not is_totally_psd(M([[1, 1], [1, 0]]))


def test_psd_needs_every_embedding():
    sqrt5 = Q5.element(-1, 2)
    assert not is_totally_psd(half_int(Q5, [[sqrt5]]))
    assert is_totally_psd(half_int(Q5, [[sqrt5 + 3]]), strict=True)


def test_plus_witness_examples():
    assert plus_support_witness(M([[3]]), -1) == (Q(1),)
    assert plus_support_witness(M([[1]]), -1) is None
    assert plus_support_witness(M([[3, 1], [1, 3]]), -1) == (Q(1), Q(1))


def test_witness_requires_half_integral():
    with pytest.raises(NotHalfIntegral):
        plus_witnesses(SymMatrix(Q, [[Fraction(1, 2)]]), -1)


def test_enumeration_examples():
    assert [T.rows[0][0] for T in enumerate_psd(Q, 1, 2)] == [Q(0), Q(1), Q(2)]
    got = set(enumerate_psd(Q, 2, 1))
    assert got == {M([[0, 0], [0, 0]]), M([[1, 0], [0, 0]]), M([[0, 0], [0, 1]])}


def test_enumeration_over_q5_is_totally_nonnegative_integers():
    got = enumerate_psd(Q5, 1, 2)
    xs = [T.rows[0][0] for T in got]
    assert all(x.is_integral() and x.trace() <= 2 for x in xs)
    # 0, 1, 2 and the two totally positive units of trace <= 2 are omega^2/... checked by brute force
    box = [Q5.element(a, b) for a in range(-6, 7) for b in range(-6, 7)]
    want = {x for x in box if x.trace() <= 2 and is_totally_psd(half_int(Q5, [[x]]))}
    assert set(xs) == want


def _brute(F, m, bound, box):
    half = [Fraction(k, 2) for k in range(-2 * box, 2 * box + 1)]
    out = set()
    for vals in itertools.product(half, repeat=m * (m + 1) // 2):
        rows = [[Fraction(0)] * m for _ in range(m)]
        it = iter(vals)
        for j in range(m):
            for k in range(j, m):
                rows[j][k] = rows[k][j] = next(it)
        S = SymMatrix(F, rows)
        if S.is_half_integral() and is_totally_psd(S) and S.total_trace() <= bound:
            out.add(half_int(F, rows))
    return out


@pytest.mark.parametrize("bound", [0, 2, 4])
def test_enumeration_matches_brute_force(bound):
    assert set(enumerate_psd(Q, 2, bound)) == _brute(Q, 2, bound, bound)


def test_enumeration_is_permutation_closed():
    Ts = set(enumerate_psd(Q5, 2, 3))
    for T in Ts:
        (a, b), (c, d) = T.rows
        assert half_int(Q5, [[d, c], [b, a]]) in Ts


def test_residue_vector_count():
    assert len(residue_vectors(Q5, 2)) == 16
    assert len(residue_vectors(Q, 3)) == 8


@given(st.integers(0, 40), st.integers(0, 40), st.integers(-20, 20))
def test_witness_reverifies_and_is_unique(a, d, b2):
    # diagonal in Z, off-diagonal in (1/2) Z
    T = M([[a, Fraction(b2, 2)], [Fraction(b2, 2), d]])
    found = plus_witnesses(T, -1)
    assert len(found) <= 1
    for lam in found:
        assert in_4L_dual(T.scale(-1) - SymMatrix(Q, outer(lam)))


@pytest.mark.parametrize("F,m,bound", [(Q, 1, 30), (Q, 2, 8), (Q5, 1, 10), (Q5, 2, 6), (Q, 3, 4)])
def test_plus_filtered_enumeration_matches_filtering_after(F, m, bound):
    full = [T for T in enumerate_psd(F, m, bound) if plus_support_witness(T, -1) is not None]
    assert list(enumerate_psd(F, m, bound, plus_eta=-1)) == full
