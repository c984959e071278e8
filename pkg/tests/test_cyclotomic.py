from __future__ import annotations

from fractions import Fraction

from hypothesis import given, strategies as st

from plusspace.cyclotomic import ONE, CycScalar, conjugate, is_unit_modulus, root_of_unity, to_complex


def test_roots_of_unity():
    assert root_of_unity(1, 2) == CycScalar.rational(-1)
    assert root_of_unity(1, 8) ** 4 == CycScalar.rational(-1)
    s = root_of_unity(1, 8) + root_of_unity(-1, 8)
    assert abs(to_complex(s, 40).center - 1.41421356) < 1e-8


def test_conjugation():
    z = root_of_unity(1, 8)
    assert conjugate(z) == root_of_unity(7, 8)
    assert conjugate(CycScalar.rational(Fraction(3, 2))) == CycScalar.rational(Fraction(3, 2))
    assert z * conjugate(z) == ONE


def test_complex_boxes():
    assert to_complex(CycScalar.rational(-1), 30).contains(-1)
    assert to_complex(root_of_unity(1, 4), 30).contains(1j)
    box = to_complex(root_of_unity(1, 8), 50)
    assert abs(box.center - complex(2 ** -0.5, 2 ** -0.5)) < 1e-14 and box.radius <= 2 ** -50


def test_mixed_orders_meet_in_lcm():
    z = root_of_unity(1, 8) * root_of_unity(1, 3)
    assert z ** 24 == ONE and z ** 12 != ONE


def test_canonical_form_is_unique():
    # zeta_4^2 collapses to the rational -1 regardless of the working order
    assert root_of_unity(1, 4) * root_of_unity(1, 4) == root_of_unity(3, 6)
    assert hash(root_of_unity(2, 8)) == hash(root_of_unity(1, 4))


def scalars():
    frac = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 6))
    coeffs = st.lists(frac, min_size=4, max_size=4)
    return st.builds(lambda c: CycScalar(8, c), coeffs)


@given(scalars(), scalars(), scalars())
def test_ring_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert conjugate(a * b) == conjugate(a) * conjugate(b)
    assert conjugate(conjugate(a)) == a


@given(st.integers(-20, 20), st.sampled_from([1, 2, 4, 8, 16, 3, 12]))
def test_unit_modulus_agrees_with_boxes(k, n):
    z = root_of_unity(k, n)
    assert is_unit_modulus(z)
    assert abs(abs(to_complex(z, 40).center) - 1) < 1e-9
    assert not is_unit_modulus(z * 2)
