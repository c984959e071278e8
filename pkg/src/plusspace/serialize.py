"""Byte-deterministic JSON for fields, scalars, matrices, expansions and words.

Rationals are always strings.  Over Q a field element is a single string;
over a quadratic field it is a pair of strings on the integral basis (1, omega).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cyclotomic import CycScalar
from .expansions import JacobiExpansion, PlusExpansion, SplitFamily
from .field import RATIONAL, FieldElement, FieldSpec, real_quadratic
from .symmat import SymMatrix, as_best


class FormatError(ValueError):
    """Malformed input document; carries a position when one is known."""

    def __init__(self, msg, line=None, col=None, pos=None):
        where = f" at line {line} column {col} (char {pos})" if line is not None else ""
        super().__init__(msg + where)
        self.line, self.col, self.pos = line, col, pos


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno, exc.pos) from None


def frac_json(x) -> str:
    return str(Fraction(x))


def parse_frac(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise FormatError(f"expected a rational string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad rational {s!r}") from None


# --- fields and elements ----------------------------------------------


def field_json(F: FieldSpec) -> dict:
    return F.to_json()


def parse_field(obj) -> FieldSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FormatError("field must be an object with a 'kind'")
    if obj["kind"] == "rational":
        return RATIONAL
    if obj["kind"] == "real_quadratic":
        try:
            return real_quadratic(int(obj["d"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise FormatError(f"bad real quadratic field: {exc}") from None
    raise FormatError(f"unknown field kind {obj['kind']!r}")


def field_from_flag(text: str) -> FieldSpec:
    """'Q' or 'Q(sqrt5)' or '5'."""
    t = text.strip().replace(" ", "")
    if t in ("Q", "rational"):
        return RATIONAL
    for prefix in ("Q(sqrt", "sqrt"):
        if t.startswith(prefix):
            t = t[len(prefix):].rstrip(")")
    try:
        return real_quadratic(int(t))
    except ValueError:
        raise FormatError(f"cannot read field {text!r}; use Q or Q(sqrtd)") from None


def elt_json(x: FieldElement):
    if x.field.degree == 1:
        return frac_json(x.coords[0])
    return [frac_json(c) for c in x.coords]


def parse_elt(F: FieldSpec, obj) -> FieldElement:
    if isinstance(obj, list):
        if len(obj) != F.degree:
            raise FormatError(f"element {obj!r} needs {F.degree} coordinates")
        return F.coerce(tuple(parse_frac(c) for c in obj)) if F.degree > 1 else F.coerce(parse_frac(obj[0]))
    if F.degree != 1:
        raise FormatError(f"element {obj!r} needs {F.degree} coordinates")
    return F.coerce(parse_frac(obj))


def matrix_json(M) -> list:
    rows = M.rows if isinstance(M, SymMatrix) else M
    return [[elt_json(x) for x in row] for row in rows]


def parse_matrix(F: FieldSpec, obj) -> list:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) and len(r) == len(obj) for r in obj):
        raise FormatError(f"matrix must be a square list of rows, got {obj!r}")
    return [[parse_elt(F, x) for x in row] for row in obj]


def parse_sym(F: FieldSpec, obj) -> SymMatrix:
    rows = parse_matrix(F, obj)
    try:
        return as_best(F, rows)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def vector_json(v) -> list:
    return [elt_json(x) for x in v]


def parse_vector(F: FieldSpec, obj) -> tuple:
    if not isinstance(obj, list):
        raise FormatError(f"vector must be a list, got {obj!r}")
    return tuple(parse_elt(F, x) for x in obj)


# --- scalars ------------------------------------------------------------


def scalar_json(c: CycScalar) -> dict:
    return {"order": c.order, "coeffs": [frac_json(x) for x in c.coeffs]}


def parse_scalar(obj) -> CycScalar:
    if isinstance(obj, (str, int)) and not isinstance(obj, bool):
        return CycScalar.rational(parse_frac(obj))
    if not isinstance(obj, dict) or "order" not in obj or "coeffs" not in obj:
        raise FormatError(f"scalar must be {{'order','coeffs'}}, got {obj!r}")
    try:
        return CycScalar(int(obj["order"]), [parse_frac(x) for x in obj["coeffs"]])
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad scalar: {exc}") from None


# --- expansions ---------------------------------------------------------


def _header(kind, F, m, weight, eta, bound) -> dict:
    return {"kind": kind, "field": field_json(F), "m": m, "weight": list(weight),
            "eta": elt_json(eta), "trace_bound": frac_json(bound)}


def expansion_json(h) -> dict:
    if isinstance(h, JacobiExpansion):
        out = _header("jacobi", h.field, h.m, h.weight, h.eta, h.trace_bound)
        out["coefficients"] = [{"T": matrix_json(T), "lambda": vector_json(lam), "c": scalar_json(c)}
                               for (T, lam), c in h.coeffs.items()]
        return out
    if isinstance(h, SplitFamily):
        out = _header("family", h.field, h.m, h.weight, h.eta, h.trace_bound)
        out["components"] = [{"lambda": vector_json(lam),
                              "coefficients": [{"T": matrix_json(T), "c": scalar_json(c)}
                                               for T, c in comp.items()]}
                             for lam, comp in h.components.items()]
        return out
    kind = "plus" if isinstance(h, PlusExpansion) else "fourier"
    out = _header(kind, h.field, h.m, h.weight, h.eta, h.trace_bound)
    out["coefficients"] = [{"T": matrix_json(T), "c": scalar_json(c)} for T, c in h.coeffs.items()]
    return out


def _require(obj, *keys):
    if not isinstance(obj, dict):
        raise FormatError("expected a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise FormatError(f"missing field(s): {', '.join(missing)}")


def parse_expansion(obj):
    _require(obj, "kind", "field", "m", "weight", "trace_bound", "coefficients" if obj.get("kind") != "family"
             else "components")
    F = parse_field(obj["field"])
    m = int(obj["m"])
    weight = [int(k) for k in obj["weight"]]
    eta = parse_elt(F, obj.get("eta", "-1"))
    bound = parse_frac(obj["trace_bound"])
    kind = obj["kind"]
    try:
        if kind == "plus":
            coeffs = {}
            for item in obj["coefficients"]:
                T = parse_sym(F, item["T"])
                if T in coeffs:
                    raise FormatError(f"duplicate key {matrix_json(T)}")
                coeffs[T] = parse_scalar(item["c"])
            return PlusExpansion(F, m, weight, coeffs, bound, eta)
        if kind == "jacobi":
            coeffs = {}
            for item in obj["coefficients"]:
                key = (parse_sym(F, item["T"]), parse_vector(F, item["lambda"]))
                if key in coeffs:
                    raise FormatError("duplicate Jacobi key")
                coeffs[key] = parse_scalar(item["c"])
            return JacobiExpansion(F, m, weight, coeffs, bound, eta)
        if kind == "family":
            comps = {}
            for comp in obj["components"]:
                lam = parse_vector(F, comp["lambda"])
                comps[lam] = {parse_sym(F, it["T"]): parse_scalar(it["c"]) for it in comp["coefficients"]}
            return SplitFamily(F, m, weight, comps, bound, eta)
    except KeyError as exc:
        raise FormatError(f"missing field {exc}") from None
    raise FormatError(f"unknown expansion kind {kind!r}")


# --- words ----------------------------------------------------------------


def word_json(word) -> list:
    return [t.to_json() for t in word]


def parse_word(F_local, obj) -> tuple:
    from .weil.words import parse_token

    if not isinstance(obj, list):
        raise FormatError("word must be a list of tokens")
    try:
        return tuple(parse_token(F_local, t) for t in obj)
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"bad token: {exc}") from None
