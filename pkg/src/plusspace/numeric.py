"""Numeric evaluation of expansions and theta series with error balls.

Values are returned as :class:`Ball` objects (complex center, real radius).
The radius accounts for the truncation tail of lattice sums and for rounding.
Finite expansions have no tail.

Tail estimate: the points of a coset x0 + o^m, embedded in R^(nm), are at
mutual distance >= 1 (a nonzero integer has Tr(x^2) >= n), so at most
(2t+3)^(nm) of them satisfy |x| < t+1.  Each term of the theta series has
modulus exp(-2 pi (sum_j x_j^t Y_j x_j + 2 x_j^t Im w_j)), which is at most
exp(-2 pi (y R^2 - 2 V R)) with y the smallest eigenvalue of the Y_j,
V = |Im w| and R = |x|.  Summing over unit shells gives a certified bound.

Rounding: the double-precision path (precision <= 48 bits) is vectorized with
numpy and charged a radius of 64 * (nterms + |phase|max) * 2^-52 * sum |term|,
a generous model of the accumulated error of the phase and exp computations.
Higher precisions run through mpmath with a matching model at its working
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .cyclotomic import CycScalar
from .expansions import (
    FourierExpansion,
    JacobiExpansion,
    SplitFamily,
    coset_vectors,
)
from .field import FieldElement, FieldSpec, embed_real
from .symmat import SymMatrix, mat_mul


class TailBoundTooLarge(ValueError):
    def __init__(self, required):
        super().__init__(f"certified tail needs a truncation bound of about {required}")
        self.required = required


class NotInGroup(ValueError):
    pass


@dataclass(frozen=True)
class Ball:
    center: complex
    radius: float

    def __add__(self, other):
        other = _ball(other)
        return Ball(self.center + other.center, self.radius + other.radius)

    __radd__ = __add__

    def __sub__(self, other):
        other = _ball(other)
        return Ball(self.center - other.center, self.radius + other.radius)

    def __neg__(self):
        return Ball(-self.center, self.radius)

    def __mul__(self, other):
        other = _ball(other)
        r = abs(self.center) * other.radius + abs(other.center) * self.radius + self.radius * other.radius
        return Ball(self.center * other.center, _up(r))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _ball(other)
        denom = abs(other.center) - other.radius
        if denom <= 0:
            raise ZeroDivisionError("ball division by a ball containing 0")
        q = self.center / other.center
        r = (self.radius + abs(q) * other.radius) / denom
        return Ball(q, _up(r))

    def __pow__(self, k: int):
        out = Ball(1, 0.0)
        for _ in range(k):
            out = out * self
        return out

    def abs_upper(self) -> float:
        return _up(abs(self.center) + self.radius)

    def contains(self, z) -> bool:
        return abs(complex(z) - complex(self.center)) <= self.radius

    def overlaps(self, other: "Ball", tol: float = 0.0) -> bool:
        return abs(complex(self.center) - complex(other.center)) <= self.radius + other.radius + tol

    def as_complex(self) -> complex:
        return complex(self.center)


def _ball(x) -> Ball:
    if isinstance(x, Ball):
        return x
    if isinstance(x, CycScalar):
        return scalar_ball(x, 60)
    return Ball(x, 0.0)


def _up(r) -> float:
    # round a radius upward a little to absorb float error in the radius itself
    r = float(r)
    return r * (1 + 1e-12) + 1e-300 if r > 0 else 0.0


def scalar_ball(c: CycScalar, precision: int = 60) -> Ball:
    box = c.to_complex(precision)
    center = complex(float(box.re.mid), float(box.im.mid))
    # the widths are themselves intervals; take their upper endpoints
    width = (box.re.delta + box.im.delta).b
    rad = float(mpmath.mpf(width)) + 2 * abs(center) * 2.0 ** -52
    return Ball(center, _up(rad))


# ---------------------------------------------------------------------
# points of the Siegel half-space


@dataclass
class Point:
    """z = (z_1..z_n) complex symmetric m x m, w = (w_1..w_n) complex m-vectors."""

    z: np.ndarray  # shape (n, m, m)
    w: np.ndarray  # shape (n, m)
    y_min: float
    v_norm: float
    z_mp: list | None = None  # optional high-precision copy of z


def make_point(field: FieldSpec, m: int, z, w=None) -> Point:
    n = field.degree
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = np.full((n, 1, 1), complex(z))
    elif z.ndim == 2:
        z = np.broadcast_to(z, (n,) + z.shape).copy()
    if z.shape != (n, m, m):
        raise ValueError(f"z must have shape ({n}, {m}, {m})")
    if not np.allclose(z, np.transpose(z, (0, 2, 1)), rtol=0, atol=1e-14):
        raise ValueError("z must be symmetric")
    if w is None:
        w = np.zeros((n, m), dtype=complex)
    else:
        w = np.asarray(w, dtype=complex)
        if w.ndim == 1:
            w = np.broadcast_to(w, (n, m)).copy()
        if w.shape != (n, m):
            raise ValueError(f"w must have shape ({n}, {m})")
    eig = min(float(np.linalg.eigvalsh(zj.imag).min()) for zj in z)
    # conservative lower bound on the smallest eigenvalue
    y_min = eig - 1e-12 * (1 + float(np.abs(z.imag).max()))
    if y_min <= 0:
        raise ValueError("imaginary part of z must be totally positive definite")
    v_norm = float(np.sqrt((w.imag ** 2).sum())) * (1 + 1e-12)
    return Point(z, w, y_min, v_norm)


# ---------------------------------------------------------------------
# tail bounds


def _log_tail(y: float, v: float, dim: int, t0: int) -> float:
    """log of sum_{t >= t0} (2t+3)^dim exp(-2 pi (y t^2 - 2 v t))."""
    logs = []
    t = t0
    prev = None
    while True:
        lt = dim * math.log(2 * t + 3) - 2 * math.pi * (y * t * t - 2 * v * t)
        logs.append(lt)
        if prev is not None and lt < prev:
            ratio = math.exp(lt - prev)
            if ratio < 0.5:
                # geometric remainder: the ratio keeps decreasing past the peak
                logs.append(lt + math.log(ratio / (1 - ratio)))
                break
        prev = lt
        t += 1
        if t - t0 > 10 ** 6:
            return math.inf
    top = max(logs)
    return top + math.log(sum(math.exp(v_ - top) for v_ in logs))


def lattice_tail(y: float, v: float, dim: int, bound: float) -> float:
    """Bound for sum over coset points with |x|^2 > bound of the term modulus."""
    t0 = int(math.floor(math.sqrt(bound)))
    if t0 < v / y + 1:
        return math.inf
    return math.exp(_log_tail(y, v, dim, t0)) * 1.01


def required_bound(y: float, v: float, dim: int, target: float, max_bound: float) -> Fraction:
    """Smallest bound on the grid ceil(1.15^k) whose tail is below target."""
    b = max(1.0, (v / y + 2) ** 2)
    while True:
        if lattice_tail(y, v, dim, b) <= target:
            return Fraction(math.ceil(b))
        if b > max_bound:
            raise TailBoundTooLarge(math.ceil(b))
        b = b * 1.15 + 1


# ---------------------------------------------------------------------
# evaluation backends


def _embed_array(vectors, field: FieldSpec) -> np.ndarray:
    """shape (K, n, m) float embeddings of exact vectors."""
    n = field.degree
    if not vectors:
        return np.zeros((0, n, 0))
    m = len(vectors[0])
    rt = math.sqrt(field.d) if field.d else 0.0
    out = np.empty((len(vectors), n, m))
    for idx, vec in enumerate(vectors):
        for a, x in enumerate(vec):
            p, q = x.pq()
            fp, fq = float(p), float(q) * rt
            out[idx, 0, a] = fp + fq
            if n == 2:
                out[idx, 1, a] = fp - fq
    return out


def _embed_matrix(T: SymMatrix) -> np.ndarray:
    n = T.field.degree
    out = np.empty((n, T.m, T.m))
    for j in range(T.m):
        for k in range(T.m):
            out[:, j, k] = T.rows[j][k].embeddings()
    return out


_EPS = 2.0 ** -52


def _sum_exp(phase: np.ndarray):
    """sum exp(2 pi i phase) with a rounding radius."""
    if phase.size == 0:
        return 0j, 0.0
    terms = np.exp(2j * np.pi * phase)
    total = complex(terms.sum())
    mags = np.abs(terms)
    rad = 64 * (phase.size + float(np.abs(phase).max()) + 1) * _EPS * float(mags.sum())
    return total, rad


class _MP:
    """mpmath evaluation context at a working precision."""

    def __init__(self, bits: int):
        self.bits = bits + 24

    def __enter__(self):
        self._saved = mpmath.mp.prec
        mpmath.mp.prec = self.bits
        return self

    def __exit__(self, *exc):
        mpmath.mp.prec = self._saved

    def embed(self, x: FieldElement, i: int):
        lo, hi = embed_real(x, i, self.bits)
        return (mpmath.mpf(lo.numerator) / lo.denominator + mpmath.mpf(hi.numerator) / hi.denominator) / 2


def _mp_point(point: Point):
    if point.z_mp is not None:
        z = point.z_mp
    else:
        z = [[[mpmath.mpc(complex(point.z[j, a, b])) for b in range(point.z.shape[2])]
              for a in range(point.z.shape[1])] for j in range(point.z.shape[0])]
    w = [[mpmath.mpc(complex(point.w[j, a])) for a in range(point.w.shape[1])] for j in range(point.w.shape[0])]
    return z, w


def _mp_sum(phases):
    total = mpmath.mpc(0)
    mags = mpmath.mpf(0)
    pmax = mpmath.mpf(0)
    two_pi_i = 2j * mpmath.pi
    for ph in phases:
        t = mpmath.exp(two_pi_i * ph)
        total += t
        mags += abs(t)
        pmax = max(pmax, abs(ph))
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec)
    rad = 64 * (len(phases) + pmax + 1) * eps * mags
    return total, rad


# ---------------------------------------------------------------------
# series


def _quadratic_phase(X: np.ndarray, point: Point) -> np.ndarray:
    # sum_j x_j^t z_j x_j + 2 x_j^t w_j
    quad = np.einsum("kja,jab,kjb->k", X, point.z, X)
    lin = np.einsum("kja,ja->k", X, point.w)
    return quad + 2 * lin


def theta_value(field: FieldSpec, m: int, lam: Sequence, point: Point, precision: int = 40,
                max_bound: float = 10 ** 6) -> Ball:
    """theta_lambda(z, w) = sum_{x in lambda/2 + o^m} e(Tr(x^t z x + 2 x^t w))."""
    lam = tuple(field.coerce(x) for x in lam)
    shift = tuple(x * Fraction(1, 2) for x in lam)
    target = 2.0 ** -(precision + 2)
    bound = required_bound(point.y_min, point.v_norm, m * field.degree, target, max_bound)
    vecs = coset_vectors(field, m, shift, bound)
    tail = lattice_tail(point.y_min, point.v_norm, m * field.degree, float(bound))
    if precision <= 48:
        X = _embed_array(list(vecs), field)
        total, rad = _sum_exp(_quadratic_phase(X, point))
        return Ball(total, _up(rad + tail))
    with _MP(precision) as ctx:
        z, w = _mp_point(point)
        phases = []
        for vec in vecs:
            ph = 0
            for j in range(field.degree):
                xs = [ctx.embed(x, j + 1) for x in vec]
                for a in range(m):
                    ph += 2 * xs[a] * w[j][a]
                    for b in range(m):
                        ph += xs[a] * z[j][a][b] * xs[b]
            phases.append(ph)
        total, rad = _mp_sum(phases)
        return Ball(complex(total), _up(float(rad) + tail + abs(complex(total)) * _EPS))


def _fourier_value(h: FourierExpansion, point: Point, precision: int) -> Ball:
    total = Ball(0j, 0.0)
    for T, c in h.coeffs.items():
        # Tr tr(T z) = sum_j sum_ab T_ab z_ba
        phase = complex((_embed_matrix(T) * point.z.transpose(0, 2, 1)).sum())
        val, rad = _sum_exp(np.array([phase]))
        total = total + scalar_ball(c, precision + 8) * Ball(val, rad)
    return total


def _jacobi_value(G: JacobiExpansion, point: Point, precision: int, max_bound: float) -> Ball:
    """Direct summation over raw keys (N, r) = ((T + r r^t)/4, r), r in lambda + 2 o^m."""
    field, m, n = G.field, G.m, G.field.degree
    total = Ball(0j, 0.0)
    by_lam: dict = {}
    for (T, lam), c in G.coeffs.items():
        by_lam.setdefault(lam, []).append((T, c))
    for lam, items in by_lam.items():
        # coefficient weights |c| |e(Tr tr(T z)/4)| scale the tail target
        weights = []
        for T, c in items:
            emb = _embed_matrix(T)
            decay = math.exp(-2 * math.pi * float((emb * point.z.imag).sum()) / 4)
            weights.append(scalar_ball(c).abs_upper() * decay)
        target = 2.0 ** -(precision + 4) / max(1.0, sum(weights)) / max(1, len(by_lam))
        # r = 2x with x in lambda/2 + o^m; the tail is that of theta_lambda
        bound = required_bound(point.y_min, point.v_norm, m * n, target, max_bound)
        shift = tuple(x * Fraction(1, 2) for x in lam)
        rs = [tuple(a * 2 for a in x) for x in coset_vectors(field, m, shift, bound)]
        R = _embed_array(rs, field)
        # Tr tr(r r^t z)/4 + Tr(r^t w)
        quad = np.einsum("kja,jab,kjb->k", R, point.z, R) / 4
        lin = np.einsum("kja,ja->k", R, point.w)
        tail = lattice_tail(point.y_min, point.v_norm, m * n, float(bound))
        for (T, c), wgt in zip(items, weights):
            emb = _embed_matrix(T)
            const = complex((emb * point.z.transpose(0, 2, 1)).sum()) / 4
            val, rad = _sum_exp(quad + lin + const)
            total = total + scalar_ball(c, precision + 8) * Ball(val, _up(rad + tail * wgt / max(
                scalar_ball(c).abs_upper(), 1e-300)))
    return total


def _family_value(family: SplitFamily, point: Point, precision: int, max_bound: float) -> Ball:
    """sum_lambda h_lambda(z) theta_lambda(z, w)."""
    total = Ball(0j, 0.0)
    for lam, comp in family.components.items():
        if not comp:
            continue
        h = family.component_expansion(lam)
        hv = _fourier_value(h, point, precision)
        # theta precision chosen so the product error stays below the target
        extra = max(0, int(math.log2(max(1.0, hv.abs_upper()))) + 4)
        tv = theta_value(family.field, family.m, lam, point, precision + extra, max_bound)
        total = total + hv * tv
    return total


class ThetaSeries:
    """theta_lambda as an evaluable object."""

    def __init__(self, field: FieldSpec, m: int, lam: Sequence):
        self.field = field
        self.m = m
        self.lam = tuple(field.coerce(x) for x in lam)


def eval_numeric(form, z, w=None, precision: int = 40, max_bound: float = 10 ** 6) -> Ball:
    """Evaluate an expansion, split family or theta series at (z, w)."""
    field, m = form.field, form.m
    point = make_point(field, m, z, w)
    if isinstance(form, ThetaSeries):
        return theta_value(field, m, form.lam, point, precision, max_bound)
    if isinstance(form, FourierExpansion):
        return _fourier_value(form, point, precision)
    if isinstance(form, JacobiExpansion):
        return _jacobi_value(form, point, precision, max_bound)
    if isinstance(form, SplitFamily):
        return _family_value(form, point, precision, max_bound)
    raise TypeError(f"cannot evaluate {type(form).__name__}")


# ---------------------------------------------------------------------
# theta transformation law


def _ideal_ok(x: FieldElement, gen: FieldElement) -> bool:
    return (x / gen).is_integral() if not x.is_zero() else True


def check_gamma0_4(field: FieldSpec, gamma) -> None:
    """Exact membership test for Gamma_0(4): a, d in o; b in d^-1; c in 4d."""
    two_m = len(gamma)
    m = two_m // 2
    g = [[field.coerce(x) for x in row] for row in gamma]
    a = [row[:m] for row in g[:m]]
    b = [row[m:] for row in g[:m]]
    c = [row[:m] for row in g[m:]]
    d = [row[m:] for row in g[m:]]
    delta = field.different_gen
    if not all(x.is_integral() for blk in (a, d) for row in blk for x in row):
        raise NotInGroup("a and d must be integral")
    if not all((x * delta).is_integral() for row in b for x in row):
        raise NotInGroup("b must lie in the inverse different")
    four_delta = delta * 4
    if not all(_ideal_ok(x, four_delta) for row in c for x in row):
        raise NotInGroup("c must lie in 4 times the different")
    # symplectic: g^t J g = J
    zero, one = field.zero, field.one
    J = [[zero] * two_m for _ in range(two_m)]
    for i in range(m):
        J[i][m + i] = one
        J[m + i][i] = -one
    gt = [list(r) for r in zip(*g)]
    if mat_mul(mat_mul(gt, J), g) != J:
        raise NotInGroup("matrix is not symplectic")


def _mp_embed_block(g, i, rows, cols, ctx):
    return mpmath.matrix([[ctx.embed(g[r][c], i) for c in cols] for r in rows])


def theta_transform_residual(field: FieldSpec, gamma, z, precision: int = 80,
                             max_bound: float = 10 ** 7) -> float:
    """|(theta(gamma z)/theta(z))^4 - prod_j det(c_j z_j + d_j)^2| as a certified upper bound."""
    check_gamma0_4(field, gamma)
    two_m = len(gamma)
    m = two_m // 2
    n = field.degree
    g = [[field.coerce(x) for x in row] for row in gamma]
    base = make_point(field, m, z)
    with _MP(precision) as ctx:
        zs = []
        zs_mp = []
        dets = mpmath.mpc(1)
        for j in range(n):
            A = _mp_embed_block(g, j + 1, range(m), range(m), ctx)
            B = _mp_embed_block(g, j + 1, range(m), range(m, two_m), ctx)
            C = _mp_embed_block(g, j + 1, range(m, two_m), range(m), ctx)
            D = _mp_embed_block(g, j + 1, range(m, two_m), range(m, two_m), ctx)
            Z = mpmath.matrix([[mpmath.mpc(complex(base.z[j, a, b])) for b in range(m)] for a in range(m)])
            den = C * Z + D
            zp = (A * Z + B) * mpmath.inverse(den)
            zp = (zp + zp.T) / 2
            zs.append([[complex(zp[a, b]) for b in range(m)] for a in range(m)])
            zs_mp.append([[zp[a, b] for b in range(m)] for a in range(m)])
            dets *= mpmath.det(den) ** 2
        rhs = complex(dets)
    moved = make_point(field, m, np.array(zs))
    moved.z_mp = zs_mp
    zero = tuple(field.zero for _ in range(m))
    th_z = theta_value(field, m, zero, base, precision, max_bound)
    scale = max(1.0, abs(rhs)) ** 0.25
    extra = int(math.log2(scale * 4)) + 8
    th_gz = theta_value(field, m, zero, moved, precision + extra, max_bound)
    ratio = (th_gz / th_z) ** 4
    diff = ratio - Ball(rhs, abs(rhs) * 2.0 ** -(precision - 4))
    return diff.abs_upper()
