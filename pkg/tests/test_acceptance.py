"""Acceptance suite: one test per criterion, one PASS/FAIL line per criterion.

Each criterion is a plain function returning (passed, detail).  Under pytest
the summary lines are printed by the terminal-summary hook in conftest.py;
run this file directly to print them without pytest.
"""

from __future__ import annotations

import random
import time
from functools import lru_cache

import numpy as np
import pytest

from plusspace.expansions import compose_theta, jacobi_of_plus, plus_of_jacobi, split_plus
from plusspace.field import RATIONAL, real_quadratic
from plusspace.numeric import eval_numeric, theta_transform_residual
from plusspace.samples import random_gamma0_4, random_plus_expansion
from plusspace.symmat import half_int, plus_support_witness
from plusspace.weil import checks
from plusspace.weil.local import LocalField

Q5 = real_quadratic(5)
CONFIGS = [(RATIONAL, 1), (RATIONAL, 2), (Q5, 1), (Q5, 2)]
PER_CONFIG = 100
BOUND = 20

RESULTS: dict[int, tuple[bool, str]] = {}


@lru_cache(maxsize=None)
def corpus():
    out = []
    for n, (F, m) in enumerate(CONFIGS):
        rng = random.Random(1000 + n)
        out += [random_plus_expansion(F, m, BOUND, rng) for _ in range(PER_CONFIG)]
    return tuple(out)


def _points(F, m, rng, count=5):
    """Seeded points with totally positive definite imaginary part."""
    n = F.degree
    pts = []
    for _ in range(count):
        z = np.zeros((n, m, m), dtype=complex)
        for j in range(n):
            X = rng.uniform(-0.5, 0.5, (m, m))
            E = rng.uniform(-0.15, 0.15, (m, m))
            z[j] = (X + X.T) / 2 + 1j * (rng.uniform(0.8, 1.4) * np.eye(m) + (E + E.T) / 2)
        w = rng.uniform(-0.3, 0.3, (n, m)) + 1j * rng.uniform(-0.2, 0.2, (n, m))
        pts.append((z, w))
    return pts


# ---------------------------------------------------------------------
# criteria


def criterion_1():
    start = time.perf_counter()
    hs = corpus()
    bad = 0
    for h in hs:
        G = jacobi_of_plus(h)
        if plus_of_jacobi(G) != h or jacobi_of_plus(plus_of_jacobi(G)) != G:
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    return ok, f"{len(hs)} expansions, {bad} round-trip failures, {elapsed:.1f}s (limit 60s)"


def criterion_2():
    rng = np.random.default_rng(2)
    exact_bad = numeric_bad = evals = 0
    worst = 0.0
    for h in corpus():
        fam = split_plus(h)
        G = jacobi_of_plus(h)
        if compose_theta(fam) != G:
            exact_bad += 1
        for z, w in _points(h.field, h.m, rng):
            a = eval_numeric(G, z, w)
            b = eval_numeric(fam, z, w)
            evals += 1
            worst = max(worst, abs(a.center - b.center))
            if not a.overlaps(b, 1e-8):
                numeric_bad += 1
    ok = exact_bad == 0 and numeric_bad == 0
    return ok, (f"{len(corpus())} forms: {exact_bad} exact mismatches; {evals} evaluations, "
                f"{numeric_bad} without overlap at 1e-8, max |difference| {worst:.2e}")


def criterion_3():
    accepted = {n for n in range(101) if plus_support_witness(half_int(RATIONAL, [[n]]), -1) is not None}
    want = {n for n in range(101) if n % 4 in (0, 3)}
    return accepted == want, f"{len(accepted)} accepted of 101, symmetric difference {sorted(accepted ^ want)}"


def criterion_4():
    rng = random.Random(4)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        g = random_gamma0_4(Q5, 1, rng, height=2)
        worst = max(worst, theta_transform_residual(Q5, g, [[2j]]))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 120
    return ok, f"10 elements of Gamma_0(4) over Q(sqrt5), max residual {worst:.2e}, {elapsed:.1f}s (limit 120s)"


def criterion_5():
    F = LocalField("q2")
    bad = []
    total = 0
    for m in (1, 2):
        for i in range(F.e + 1):
            for name, fn in (("unitarity", checks.unitarity), ("usharp", checks.usharp_eigen),
                             ("fourier", checks.fourier_law)):
                res = fn(F, m, i)
                total += res["checked"]
                if not res["passed"]:
                    bad.append(f"{name}(m={m},i={i})")
    return not bad, f"{total} exact comparisons, failures {bad}"


def criterion_6():
    bad = []
    xis = set()
    runs = [("q2", m) for m in (1, 2)] + [("q2sqrt2", 1), ("q4", 1)]
    for name, m in runs:
        F = LocalField(name)
        for i in range(F.e + 1):
            for S in checks.random_sym_samples(F, m, 20, 600 + 10 * m + i):
                res = checks.gauss_lemma(F, m, i, S)
                if not res["passed"]:
                    bad.append((name, m, i))
                else:
                    xis.add(repr(res["xi"]))
    return not bad, f"20 S per (field, m, i) over {runs}, xi values {sorted(xis)}, failures {len(bad)}"


def criterion_7():
    F = LocalField("q2")
    parts = []
    ok = True
    for m in (1, 2):
        law = checks.character_laws(F, m, 50, seed=70 + m)
        rel = checks.character_relation(F, m, 50, seed=80 + m)
        ok = ok and law["passed"] and rel["passed"]
        parts.append(f"m={m}: unit {law['unit_modulus']}, mult failures {law['multiplicativity_failures']}, "
                     f"relation failures {rel['failures']}")
    return ok, "; ".join(parts)


def criterion_8():
    F = LocalField("q2")
    dims = {(m, i): checks.irreducibility(F, m, i)["commutant_dim"] for m in (1, 2) for i in range(F.e + 1)}
    return all(d == 1 for d in dims.values()), f"commutant dimensions {dims}"


def criterion_9():
    F = LocalField("q2")
    r1 = checks.idempotence(F, 1, cap=10 ** 5, words=20, seed=9)
    start = time.perf_counter()
    r2 = checks.idempotence(F, 2, cap=10 ** 6, words=20, seed=10)
    elapsed = time.perf_counter() - start
    ok = r1["passed"] and r2["passed"] and elapsed < 300
    return ok, (f"m=1 order {r1['order']} (cap 1e5), E^K route failures {r1['big_ek_failures']}; "
                f"m=2 order {r2['order']} (cap 1e6) in {elapsed:.1f}s, E^K route failures {r2['big_ek_failures']}")


def criterion_10():
    q2, ram = LocalField("q2"), LocalField("q2sqrt2")
    runs = [checks.key_lemma(q2, m, 0) for m in (1, 2)]
    runs += [checks.key_lemma(ram, 1, i, samples=10, seed=100 + i) for i in (0, 1)]
    labels = ["Q2 m=1 i=0 full", "Q2 m=2 i=0 full", "Q2(sqrt2) m=1 i=0", "Q2(sqrt2) m=1 i=1"]
    detail = ", ".join(f"{lab}: {r['checked']} S, {len(r['failures'])} failures" for lab, r in zip(labels, runs))
    return all(r["passed"] for r in runs), detail


def criterion_11():
    parts = []
    ok = True
    for name in ("q2", "q4", "q2sqrt2"):
        res = checks.index_laws(LocalField(name))
        ok = ok and res["passed"]
        parts.append(f"{name}: {res['checked']} points, eighth {res['eighth_power']}, squares "
                     f"{res['square_invariance']}, negation {res['negation']}, stabilized {res['stabilized']}")
    return ok, "; ".join(parts)


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 12)}


def run_criterion(n: int) -> tuple[bool, str]:
    ok, detail = CRITERIA[n]()
    RESULTS[n] = (ok, detail)
    return ok, detail


def summary_lines() -> list[str]:
    return [f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n):
    ok, detail = run_criterion(n)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


if __name__ == "__main__":
    for n in CRITERIA:
        run_criterion(n)
        print(summary_lines()[-1], flush=True)
