from __future__ import annotations

import random

import pytest

from plusspace.cyclotomic import ZERO, CycScalar
from plusspace.weil import checks
from plusspace.weil.groups import (CapExceeded, commutant_dim, ek_function, ek_idempotence, group_closure,
                                   hecke_convolve, level_generator_images)
from plusspace.weil.local import LocalField
from plusspace.weil.operators import RepMatrix, big_ek_direct, big_ek_value

Q2 = LocalField("q2")


def diag(*xs):
    n = len(xs)
    return RepMatrix(tuple(tuple(CycScalar.coerce(xs[j]) if j == k else ZERO for k in range(n)) for j in range(n)))


@pytest.mark.parametrize("fast", [True, False])
def test_small_closures(fast):
    assert group_closure([RepMatrix.identity(2)], fast=fast).order == 1
    assert group_closure([diag(1, -1)], fast=fast).order == 2


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        group_closure(level_generator_images(Q2, 1, 0), cap=10)


@pytest.fixture(scope="module")
def gamma_q2():
    return group_closure(level_generator_images(Q2, 1, 0))


def test_closure_q2_order_and_genuineness(gamma_q2):
    assert gamma_q2.order == 96
    assert gamma_q2.has_negative_identity()


def test_both_closure_paths_agree():
    gens = level_generator_images(Q2, 1, 0)
    a, b = group_closure(gens, fast=True), group_closure(gens, fast=False)
    assert a.order == b.order
    assert {g.key() for g in a.elements} == {g.key() for g in b.elements}


def test_delta_identity_is_a_unit(gamma_q2):
    G = gamma_q2
    e = G.position(RepMatrix.identity(2))
    delta = {j: (CycScalar.rational(G.order) if j == e else ZERO) for j in range(G.order)}
    rng = random.Random(1)
    f = {j: CycScalar.rational(rng.randint(-3, 3)) for j in range(G.order)}
    assert hecke_convolve(delta, f, G) == f


def test_ek_idempotent_by_direct_convolution(gamma_q2):
    G = gamma_q2
    ek = ek_function(G, Q2, 1)
    assert hecke_convolve(ek, ek, G) == ek
    twice = {j: v * 2 for j, v in ek.items()}
    assert hecke_convolve(twice, twice, G) != twice         # negative control


def test_fast_idempotence_matches(gamma_q2):
    r = ek_idempotence(gamma_q2, Q2, 1)
    assert r["passed"] and r["order"] == 96
    slow = ek_idempotence(group_closure(level_generator_images(Q2, 1, 0), fast=False), Q2, 1)
    assert slow["passed"]


def test_characters_commute_under_convolution(gamma_q2):
    G = gamma_q2
    # matrix coefficients of the trace are class functions
    chi = {j: sum((g.rows[k][k] for k in range(g.size)), ZERO) for j, g in enumerate(G.elements)}
    psi = {j: v.conjugate() for j, v in chi.items()}
    assert hecke_convolve(chi, psi, G) == hecke_convolve(psi, chi, G)


def test_commutant_examples():
    assert commutant_dim([RepMatrix.identity(2)]) == 4
    assert commutant_dim([diag(1, 2, 2), diag(3, 5, 5)]) == 5
    assert commutant_dim([diag(1, -1), diag(2, 3)]) == 2


@pytest.mark.parametrize("m,i", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_irreducible_q2(m, i):
    assert checks.irreducibility(Q2, m, i)["passed"]


def test_reducible_negative_control():
    # dropping the non-diagonal generators leaves a reducible diagonal action
    mats = [M for M in level_generator_images(Q2, 1, 0) if M.is_diagonal()]
    assert commutant_dim(mats) > 1


def test_big_ek_routes_agree():
    for w in checks.random_words(Q2, 1, "conjugated", 20, 3):
        assert big_ek_value(w, Q2, 1) == big_ek_direct(w, Q2, 1)


@pytest.mark.slow
def test_closure_q2_m2():
    r = checks.idempotence(Q2, 2, cap=200000, words=5)
    assert r["order"] == 46080 and r["passed"] and r["negative_identity"]
