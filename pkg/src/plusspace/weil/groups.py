"""Finite image groups, Hecke convolution on them, and commutants."""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from math import lcm

import numpy as np

from ..cyclotomic import ZERO, CycScalar, _lift
from .local import LocalField
from .operators import RepMatrix, ek_on_matrix, level_matrix
from .words import group_generators


class CapExceeded(RuntimeError):
    def __init__(self, cap):
        super().__init__(f"group closure exceeded cap {cap}")
        self.cap = cap


class FiniteGroup:
    """Elements in canonical order with a key -> index map.

    Groups built by the integer fast path keep their array form and decode
    elements to exact matrices only on demand.
    """

    def __init__(self, elements: list[RepMatrix] | None, encoded=None):
        self.encoded = encoded
        self._elements = sorted(elements, key=_sort_key) if elements is not None else None
        self._index = None

    @property
    def elements(self) -> list[RepMatrix]:
        if self._elements is None:
            enc, arr = self.encoded
            self._elements = [enc.decode(a) for a in arr]
        return self._elements

    @property
    def index(self) -> dict:
        if self._index is None:
            self._index = {g.key(): j for j, g in enumerate(self.elements)}
        return self._index

    @property
    def order(self) -> int:
        if self._elements is None:
            return len(self.encoded[1])
        return len(self._elements)

    def __contains__(self, g: RepMatrix) -> bool:
        return g.key() in self.index

    def position(self, g: RepMatrix) -> int:
        return self.index[g.key()]

    def has_negative_identity(self) -> bool:
        if self._elements is None:
            enc, arr = self.encoded
            n = arr.shape[1]
            neg = np.zeros((n, n, enc.phi), dtype=np.int64)
            for j in range(n):
                neg[j, j, 0] = -enc.D
            return bool(np.any(np.all(arr == neg, axis=(1, 2, 3))))
        n = self.elements[0].size
        return RepMatrix.identity(n).scale(-1).key() in self.index


def _sort_key(g: RepMatrix):
    return tuple(repr(x) for row in g.rows for x in row)


def group_closure(generators: list[RepMatrix], cap: int = 100000, fast: bool = True) -> FiniteGroup:
    """BFS closure of the generated matrix group, canonical element order."""
    if not generators:
        raise ValueError("need at least one generator")
    if fast:
        enc = _Encoding.build(generators)
        if enc is not None:
            return enc.closure(generators, cap)
    n = generators[0].size
    ident = RepMatrix.identity(n)
    seen = {ident.key(): ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in generators:
            h = g @ s
            k = h.key()
            if k not in seen:
                seen[k] = RepMatrix(h.rows)
                if len(seen) > cap:
                    raise CapExceeded(cap)
                queue.append(seen[k])
    return FiniteGroup(list(seen.values()))


class _Encoding:
    """Matrices over Q(zeta_N), N a power of two, as integer arrays scaled by D.

    An entry sum_k c_k zeta^k (k < N/2) is stored as the integer vector D * c.
    Products are negacyclic convolutions; exact division by D is checked and a
    larger D is tried when it fails.
    """

    def __init__(self, N: int, D: int):
        self.N, self.D, self.phi = N, D, N // 2

    @staticmethod
    def build(generators):
        orders = {x.order for g in generators for row in g.rows for x in row}
        N = 4
        for o in orders:
            if o & (o - 1):
                return None
            N = max(N, o)
        D = 1
        for g in generators:
            for row in g.rows:
                for x in row:
                    for c in x.coeffs:
                        D = lcm(D, c.denominator)
        if D & (D - 1):
            return None
        return _Encoding(N, D)

    def encode(self, M: RepMatrix) -> np.ndarray:
        n = M.size
        out = np.zeros((n, n, self.phi), dtype=np.int64)
        for j, row in enumerate(M.rows):
            for k, x in enumerate(row):
                if x.order == 1:
                    coeffs = [x.coeffs[0]] + [Fraction(0)] * (self.phi - 1)
                else:
                    coeffs = _lift(list(x.coeffs), x.order, self.N)
                for t, c in enumerate(coeffs):
                    v = c * self.D
                    if v.denominator != 1:
                        raise _Rescale
                    out[j, k, t] = int(v)
        return out

    def decode(self, arr: np.ndarray) -> RepMatrix:
        n = arr.shape[0]
        rows = []
        for j in range(n):
            rows.append(tuple(CycScalar(self.N, [Fraction(int(c), self.D) for c in arr[j, k]]) for k in range(n)))
        return RepMatrix(tuple(rows))

    def multiply(self, X: np.ndarray, G: np.ndarray) -> np.ndarray:
        """Batch product X[k] @ G, X of shape (K, n, n, phi)."""
        P = np.einsum("kita,tjb->kijab", X, G)
        phi = self.phi
        R = np.zeros(X.shape, dtype=np.int64)
        for a in range(phi):
            for b in range(phi):
                s = a + b
                if s < phi:
                    R[..., s] += P[..., a, b]
                else:
                    R[..., s - phi] -= P[..., a, b]
        if np.any(R % self.D):
            raise _Rescale
        return R // self.D

    def conj(self, v: np.ndarray) -> np.ndarray:
        """Complex conjugation on the last axis: zeta^a -> -zeta^(phi-a)."""
        out = np.zeros_like(v)
        out[..., 0] = v[..., 0]
        for a in range(1, self.phi):
            out[..., self.phi - a] = -v[..., a]
        return out

    def cmul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Entrywise product in Z[zeta_N] on the last axis (no rescaling)."""
        phi = self.phi
        out = np.zeros(np.broadcast(u, v).shape, dtype=np.int64)
        for a in range(phi):
            for b in range(phi):
                s = a + b
                term = u[..., a] * v[..., b]
                if s < phi:
                    out[..., s] += term
                else:
                    out[..., s - phi] -= term
        return out

    def closure(self, generators, cap):
        enc = self
        while True:
            try:
                return enc._closure(generators, cap)
            except _Rescale:
                enc = _Encoding(enc.N, enc.D * 2)
                if enc.D > 1 << 20:
                    raise RuntimeError("denominators do not stabilize; group is not finite")

    def _closure(self, generators, cap):
        gens = [self.encode(g) for g in generators]
        n = generators[0].size
        ident = np.zeros((n, n, self.phi), dtype=np.int64)
        for j in range(n):
            ident[j, j, 0] = self.D
        seen = {ident.tobytes(): ident}
        frontier = ident[None]
        while len(frontier):
            fresh = []
            for G in gens:
                prod = self.multiply(frontier, G)
                for h in prod:
                    key = h.tobytes()
                    if key not in seen:
                        seen[key] = h
                        fresh.append(h)
                        if len(seen) > cap:
                            raise CapExceeded(cap)
            frontier = np.array(fresh, dtype=np.int64) if fresh else np.zeros((0, n, n, self.phi), np.int64)
        keys = sorted(seen)
        arr = np.array([seen[k] for k in keys], dtype=np.int64)
        return FiniteGroup(None, encoded=(self, arr))


class _Rescale(Exception):
    pass


def level_generator_images(F: LocalField, m: int, i: int) -> list[RepMatrix]:
    """Distinct images of the generators of Gamma^(i) on S^(i)."""
    out = {}
    for t in group_generators(F, m, "level", i):
        M = level_matrix(t, F, m, i)
        out.setdefault(M.key(), RepMatrix(M.rows))
    return list(out.values())


def hecke_convolve(f1: dict, f2: dict, G: FiniteGroup) -> dict:
    """(f1 * f2)(g) = |G|^-1 sum_h f1(g h^-1) f2(h), functions keyed by element index."""
    inv = [G.position(h.conj_transpose()) for h in G.elements]
    scale = Fraction(1, G.order)
    out = {}
    nz2 = [(j, v) for j, v in f2.items() if not v.is_zero()]
    for gi, g in enumerate(G.elements):
        total = ZERO
        for hj, v in nz2:
            w = f1.get(G.position(g @ G.elements[inv[hj]]), ZERO)
            if not w.is_zero():
                total = total + w * v
        out[gi] = total * scale
    return out


def ek_function(G: FiniteGroup, F: LocalField, m: int) -> dict:
    return {j: ek_on_matrix(g, F, m) for j, g in enumerate(G.elements)}


def ek_idempotence(G: FiniteGroup, F: LocalField, m: int) -> dict:
    """Exact check of e^K * e^K = e^K on the group.

    With unitary elements, (e*e)(g) = d^2/|G| sum_j conj(g[0][j]) C_j where
    C_j = sum_h h[0][j] conj(h[0][0]), so the check is linear in |G|.
    """
    d = F.q ** (m * F.e)
    if G.encoded is not None:
        return _ek_idempotence_encoded(G, d)
    n = G.elements[0].size
    C = [ZERO] * n
    for h in G.elements:
        c0 = h.rows[0][0].conjugate()
        if c0.is_zero():
            continue
        for j in range(n):
            x = h.rows[0][j]
            if not x.is_zero():
                C[j] = C[j] + x * c0
    scale = Fraction(d * d, G.order)
    failures = 0
    for g in G.elements:
        lhs = ZERO
        for j in range(n):
            x = g.rows[0][j]
            if not x.is_zero() and not C[j].is_zero():
                lhs = lhs + x.conjugate() * C[j]
        if lhs * scale != ek_on_matrix(g, F, m):
            failures += 1
    schur = all(C[j] == (CycScalar.rational(Fraction(G.order, d)) if j == 0 else ZERO) for j in range(n))
    return {"order": G.order, "failures": failures, "schur_sums": schur, "passed": failures == 0 and schur}


def _ek_idempotence_encoded(G: FiniteGroup, d: int) -> dict:
    """The same check in scaled integer form: entries are X / D."""
    enc, arr = G.encoded
    D = enc.D
    row0 = arr[:, 0, :, :]                       # (|G|, n, phi)
    c00 = enc.conj(row0[:, 0, :])                # conj(X_h00)
    C = enc.cmul(row0, c00[:, None, :]).sum(axis=0)   # D^2 * C_j
    lhs = enc.cmul(enc.conj(row0), C[None, :, :]).sum(axis=1)  # D^3 * sum_j conj(g0j) C_j
    rhs = G.order * D * D * enc.conj(row0[:, 0, :])
    failures = int(np.any(d * lhs != rhs, axis=1).sum())
    expect = np.zeros_like(C)
    expect[0, 0] = G.order * D * D
    schur = bool(np.array_equal(C * d, expect))
    return {"order": G.order, "failures": failures, "schur_sums": schur, "passed": failures == 0 and schur}


# ---------------------------------------------------------------------
# commutant


def commutant_dim(matrices: list[RepMatrix]) -> int:
    """dim {X : XM = MX for all M}, by exact elimination over the scalar field."""
    if not matrices:
        raise ValueError("need at least one matrix")
    d = matrices[0].size
    nvar = d * d
    rows = []
    for M in matrices:
        A = M.rows
        # (XM - MX)[r][s] = sum_t X[r][t] A[t][s] - A[r][t] X[t][s]
        for r in range(d):
            for s in range(d):
                eq = [ZERO] * nvar
                for t in range(d):
                    eq[r * d + t] = eq[r * d + t] + A[t][s]
                    eq[t * d + s] = eq[t * d + s] - A[r][t]
                if any(not x.is_zero() for x in eq):
                    rows.append(eq)
    return nvar - _rank(rows, nvar)


def _rank(rows: list[list[CycScalar]], ncols: int) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    for col in range(ncols):
        piv = next((j for j in range(rank, len(rows)) if not rows[j][col].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for j in range(len(rows)):
            if j != rank and not rows[j][col].is_zero():
                f = rows[j][col]
                rows[j] = [x - f * y for x, y in zip(rows[j], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank
