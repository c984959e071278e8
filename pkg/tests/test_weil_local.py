from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plusspace.cyclotomic import ONE, root_of_unity
from plusspace.weil.local import (ARCHIMEDEAN_WEIL, LocalField, NoStabilization, square_class_transversal,
                                  unit_square_classes, weil_index, weil_index_certificate)

Q2 = LocalField("q2")
Q2_PLUS = LocalField("q2", sign=1)
FIELDS = [LocalField(n) for n in ("q2", "q4", "q2sqrt2")]


def test_psi_examples():
    F = Q2_PLUS
    assert F.psi(F.K.coerce(3)) == ONE
    assert F.psi(F.K.coerce(Fraction(1, 2))) == root_of_unity(1, 2)
    assert F.psi(F.K.coerce(Fraction(1, 4))) == root_of_unity(-1, 4)
    assert Q2.psi(Q2.K.coerce(Fraction(1, 4))) == root_of_unity(1, 4)


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.name)
def test_character_index(F):
    # psi is trivial on p^-c and not on p^-c-1
    assert all(F.psi(x) == ONE for x in F.residues(3)) if F.c == 0 else True
    edge = F.varpi_pow(-F.c)
    assert all(F.psi(edge * u) == ONE for u in F.residues(2))
    assert any(F.psi(F.varpi_pow(-F.c - 1) * u) != ONE for u in F.residues(1))


def test_invariants_of_supported_fields():
    table = {F.name: (F.q, F.e, F.c) for F in FIELDS}
    assert table == {"q2": (2, 1, 0), "q4": (4, 1, 0), "q2sqrt2": (2, 2, 3)}
    assert F_val(LocalField("q2sqrt2")) == 3


def F_val(F):
    return int(F.val(F.delta))


def test_weil_index_examples():
    F = Q2
    for a in (1, 2, 3, 5):
        assert weil_index(F, F.K.coerce(a)) ** 8 == ONE
    assert weil_index(F, F.K.coerce(4)) == weil_index(F, F.K.one)
    assert weil_index(F, F.K.coerce(-1)) == weil_index(F, F.K.one).conjugate()


def test_product_formula_for_q():
    # with the character e(-{x}_2) at 2 matching e(x) at infinity, alpha_2(1) alpha_inf(1) = 1
    assert weil_index(Q2_PLUS, Q2_PLUS.K.one) * ARCHIMEDEAN_WEIL[1] == ONE


def test_square_class_counts():
    assert len(square_class_transversal(Q2)) == 8
    assert len(unit_square_classes(LocalField("q4"))) == 8
    assert len(square_class_transversal(LocalField("q2sqrt2"))) == 16


def test_index_of_zero_rejected():
    with pytest.raises(ValueError):
        weil_index(Q2, Q2.K.zero)


def test_stabilization_cap_is_reported():
    with pytest.raises(NoStabilization):
        weil_index(Q2, Q2.K.coerce(1024), cap=2)


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: F.name)
def test_certificates_agree_across_levels(F):
    for a in square_class_transversal(F):
        c = weil_index_certificate(F, a)
        assert c["agrees_next"] and c["eighth_root"]


@given(st.integers(-200, 200).filter(lambda n: n != 0), st.integers(-30, 30).filter(lambda n: n != 0))
def test_index_laws_on_random_rationals(a, b):
    F = Q2
    x, y = F.K.coerce(a), F.K.coerce(b)
    assert weil_index(F, x) ** 8 == ONE
    assert weil_index(F, x * y * y) == weil_index(F, x)
    assert weil_index(F, -x) == weil_index(F, x).conjugate()
