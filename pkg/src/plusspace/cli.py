"""Command-line entry point: JSON in, one JSON report out.

Exit codes: 0 when every certificate passed, 1 when one failed, 2 on a usage
or input-format error.  Reports are byte-deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from .cyclotomic import OrderCapExceeded
from .expansions import (FourierExpansion, InvalidExpansion, JacobiExpansion, NotPlusSupported, PlusExpansion,
                         SplitFamily, compose_theta, denormalize_jacobi_key, jacobi_of_plus, normalize_jacobi_key,
                         plus_of_jacobi, reassemble, split_plus)
from .numeric import NotInGroup as GlobalNotInGroup
from .numeric import TailBoundTooLarge, eval_numeric, theta_transform_residual
from .samples import random_gamma0_4
from .serialize import (FormatError, dumps, elt_json, expansion_json, field_from_flag, loads, matrix_json,
                        parse_elt, parse_expansion, parse_matrix, parse_sym, parse_vector, parse_word,
                        scalar_json, vector_json)
from .symmat import NotHalfIntegral, SymMatrix, enumerate_psd, in_4L_dual, is_totally_psd, outer, plus_witnesses
from .weil import checks
from .weil.groups import CapExceeded
from .weil.keylemma import key_lemma_verify
from .weil.local import LocalField, NoStabilization, weil_index_certificate
from .weil.operators import (InvarianceViolation, NotEigenvector, WindowTooSmall, check_char_relation,
                             epsilon_char, level_matrix)
from .weil.words import NotInGroup

# One line per certified property, stating what the certificate asserts.
ANCHORS = {
    "plus_support": "coefficient c(T) vanishes unless eta^-1 T = lambda lambda^t mod 4L*",
    "witness_unique": "the residue vector lambda witnessing the plus condition is unique",
    "classical_plus": "for F = Q and m = 1 the plus condition reads -n = square mod 4",
    "split_roundtrip": "h is recovered from its components h_lambda",
    "jacobi_roundtrip": "plus expansions and index-one Jacobi expansions correspond bijectively",
    "theta_path": "sum_lambda h_lambda theta_lambda equals the Jacobi form of h",
    "key_roundtrip": "(N, r) -> (4N - r r^t, r mod 2) is inverted by the canonical lift",
    "key_congruence": "T is congruent to -lambda lambda^t mod 4L*",
    "enumeration": "listed T are distinct, half-integral, totally PSD and within the trace bound",
    "numeric_overlap": "the Jacobi expansion and the theta decomposition agree numerically",
    "certified_value": "the value carries a certified error radius",
    "theta_transform": "theta(gamma z)^4 / theta(z)^4 = N(det(cz + d))^2 on Gamma_0(4)",
    "unitarity": "every generator acts by a unitary matrix on S^(i)",
    "usharp_eigen": "u#(delta^-1 varpi^2i B) acts on Phi_lambda^(i) by psi(varpi^2i lambda^t B lambda / 4 delta)",
    "fourier_law": "the transform of Phi_lambda^(i) is a twisted indicator of p^(i-c)",
    "gauss_lemma": "u-flat(delta S) acts through the quadratic Gauss-sum matrix times one eighth root of unity",
    "character": "omega(gamma) Phi_0 = epsilon(gamma)^-1 Phi_0 defines a unitary character on Gamma_0(4)",
    "char_relation": "epsilon(m(2I)^-1 gamma m(2I)) equals the companion character on Gamma^(e)",
    "irreducible": "the commutant of the level-i image is one dimensional",
    "closure": "the level-i generator image closes to a finite group",
    "negative_identity": "the image contains -1, as a genuine representation must",
    "idempotent": "e^K * e^K = e^K on the finite image, via Schur orthogonality",
    "big_ek": "E^K(g) = q^(me) (Phi_0, omega(g) Phi_0) on the conjugated group",
    "key_lemma": "h^(e-i-1) is rebuilt from h^(e-i) by u-sharp twists and u-flat acts by the Gauss-sum formula",
    "index_laws": "alpha^8 = 1, alpha(a b^2) = alpha(a) and alpha(-a) = conj alpha(a)",
    "index_stable": "the truncated Gauss integral has stabilized",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Report:
    def __init__(self, command: str):
        self.command = command
        self.payload: dict = {}
        self.certificates: list = []

    def cert(self, name: str, passed: bool, detail="") -> bool:
        self.certificates.append({"name": name, "anchor": ANCHORS.get(name.split(" ")[0], ""),
                                  "passed": bool(passed), "detail": detail})
        return bool(passed)

    def status(self) -> str:
        return "ok" if all(c["passed"] for c in self.certificates) else "fail"

    def to_json(self, status=None) -> dict:
        return {"command": self.command, "status": status or self.status(), "payload": self.payload,
                "certificates": self.certificates}


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _ball_json(b) -> dict:
    z = complex(b.center)
    return {"re": _num(z.real), "im": _num(z.imag), "radius": _num(b.radius)}


# ---------------------------------------------------------------------
# input helpers


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _json_arg(text: str):
    """Inline JSON, or @path to read it from a file."""
    return loads(_read_text(text[1:]) if text.startswith("@") else text)


def _load_expansion(path: str):
    doc = loads(_read_text(path))
    # a report from an earlier command carries its expansion as the payload
    if isinstance(doc, dict) and "command" in doc and "payload" in doc:
        doc = doc["payload"]
    return parse_expansion(doc)


def _require_kind(h, *types):
    if not isinstance(h, types):
        names = " or ".join(t.kind for t in types)
        raise FormatError(f"expected an expansion of kind {names}, got {h.kind}")
    return h


def _local(args) -> LocalField:
    return LocalField(args.local)


def _local_elt(F: LocalField, obj):
    if isinstance(obj, list):
        return F.K.coerce(tuple(Fraction(str(c)) for c in obj))
    return F.K.coerce(Fraction(str(obj)))


def _local_sym(F: LocalField, obj) -> tuple:
    if not isinstance(obj, list) or len(obj) != 0 and not all(isinstance(r, list) for r in obj):
        raise FormatError("S must be a square list of rows")
    S = tuple(tuple(_local_elt(F, x) for x in row) for row in obj)
    if any(S[j][k] != S[k][j] for j in range(len(S)) for k in range(len(S))):
        raise FormatError("S must be symmetric")
    return S


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot read complex number {text!r}") from None


# ---------------------------------------------------------------------
# coefficient commands


def cmd_plus_check(args, rep: Report):
    if args.input is None:
        F = field_from_flag(args.field)
        eta = parse_elt(F, args.eta)
        accepted, rejected = [], []
        unique = True
        for T in enumerate_psd(F, args.m, Fraction(args.bound)):
            found = plus_witnesses(T, eta)
            unique = unique and len(found) <= 1
            (accepted if found else rejected).append(matrix_json(T))
        rep.payload = {"field": F.to_json(), "m": args.m, "eta": elt_json(eta), "trace_bound": args.bound,
                       "accepted": accepted, "rejected_count": len(rejected)}
        rep.cert("witness_unique", unique)
        if F.degree == 1 and args.m == 1 and eta == F.coerce(-1):
            got = {int(Fraction(T[0][0])) for T in accepted}
            want = {n for n in range(int(Fraction(args.bound)) + 1) if n % 4 in (0, 3)}
            rep.cert("classical_plus", got == want, "accepted n are exactly n = 0, 3 mod 4")
        return
    h = _require_kind(_load_expansion(args.input), FourierExpansion)
    rows = []
    for T in h.coeffs:
        found = plus_witnesses(T, h.eta)
        rows.append({"T": matrix_json(T), "lambda": vector_json(found[0]) if found else None})
        if len(found) > 1:
            rep.cert("witness_unique", False, f"T={_show(T)}")
        if not found:
            rep.cert("plus_support", False, f"T={_show(T)} carries a nonzero coefficient but has no witness")
    if all(r["lambda"] is not None for r in rows):
        rep.cert("plus_support", True, f"{len(rows)} coefficients checked")
    rep.payload = {"witnesses": rows}


def _show(T: SymMatrix) -> str:
    if T.m == 1:
        return _elt_text(T.rows[0][0])
    return "[" + ", ".join("[" + ", ".join(_elt_text(x) for x in row) + "]" for row in T.rows) + "]"


def _elt_text(x) -> str:
    j = elt_json(x)
    return j if isinstance(j, str) else "(" + ", ".join(j) + ")"


def _as_plus(h) -> PlusExpansion:
    if isinstance(h, PlusExpansion):
        return h
    raise FormatError(f"expected a plus expansion, got {h.kind}")


def cmd_split(args, rep: Report):
    h = _as_plus(_load_expansion(args.input))
    fam = split_plus(h)
    rep.payload = expansion_json(fam)
    rep.cert("split_roundtrip", reassemble(fam) == h)


def cmd_jacobi_of_plus(args, rep: Report):
    h = _as_plus(_load_expansion(args.input))
    G = jacobi_of_plus(h)
    rep.payload = expansion_json(G)
    rep.cert("jacobi_roundtrip", plus_of_jacobi(G) == h, "plus_of_jacobi(jacobi_of_plus(h)) = h")


def cmd_plus_of_jacobi(args, rep: Report):
    G = _require_kind(_load_expansion(args.input), JacobiExpansion)
    h = plus_of_jacobi(G)
    rep.payload = expansion_json(h)
    rep.cert("jacobi_roundtrip", jacobi_of_plus(h) == G, "jacobi_of_plus(plus_of_jacobi(G)) = G")


def cmd_compose_theta(args, rep: Report):
    src = _require_kind(_load_expansion(args.input), PlusExpansion, SplitFamily)
    fam = src if isinstance(src, SplitFamily) else split_plus(src)
    G = compose_theta(fam)
    rep.payload = expansion_json(G)
    rep.cert("theta_path", G == jacobi_of_plus(reassemble(fam)))


def cmd_normalize_key(args, rep: Report):
    F = field_from_flag(args.field)
    M = parse_sym(F, _json_arg(args.matrix))
    v = parse_vector(F, _json_arg(args.vector))
    if len(v) != M.m:
        raise FormatError("vector length must equal the matrix size")
    if args.inverse:
        N, r = denormalize_jacobi_key(M, v)
        T, lam = normalize_jacobi_key(N, r)
        rep.payload = {"N": matrix_json(N), "r": vector_json(r)}
        rep.cert("key_roundtrip", (T, lam) == (M, v))
        return
    T, lam = normalize_jacobi_key(M, v)
    N, r = denormalize_jacobi_key(T, lam)
    rep.payload = {"T": matrix_json(T), "lambda": vector_json(lam)}
    rep.cert("key_roundtrip", normalize_jacobi_key(N, r) == (T, lam))
    rep.cert("key_congruence", in_4L_dual(T + SymMatrix(F, outer(lam))))


def cmd_enumerate(args, rep: Report):
    F = field_from_flag(args.field)
    bound = Fraction(args.bound)
    Ts = enumerate_psd(F, args.m, bound)
    ok = (len(set(Ts)) == len(Ts)
          and all(T.is_half_integral() and is_totally_psd(T) and T.total_trace() <= bound for T in Ts))
    rep.payload = {"field": F.to_json(), "m": args.m, "trace_bound": str(bound), "count": len(Ts),
                   "matrices": [matrix_json(T) for T in Ts]}
    rep.cert("enumeration", ok, f"{len(Ts)} matrices")


def _point(args, form):
    z = _complex(args.z)
    ident = [[z if j == k else 0 for k in range(form.m)] for j in range(form.m)]
    w = None if args.w is None else [_complex(x) for x in args.w.split(",")]
    if w is not None and len(w) != form.m:
        raise UsageError(f"--w needs {form.m} comma-separated values")
    return ident, w


def cmd_eval(args, rep: Report):
    form = _load_expansion(args.input)
    z, w = _point(args, form)
    prec = args.precision or 40
    if isinstance(form, PlusExpansion):
        val = eval_numeric(form, z, None, prec)
        jv = eval_numeric(jacobi_of_plus(form), z, w, prec)
        fv = eval_numeric(split_plus(form), z, w, prec)
        rep.payload = {"value": _ball_json(val), "jacobi": _ball_json(jv), "theta_decomposition": _ball_json(fv)}
        rep.cert("numeric_overlap", jv.overlaps(fv, 1e-8), f"|difference| = {_num(abs(jv.center - fv.center))}")
        return
    val = eval_numeric(form, z, w, prec)
    rep.payload = {"value": _ball_json(val)}
    rep.cert("certified_value", val.radius < float("inf"))


def cmd_theta_transform(args, rep: Report):
    F = field_from_flag(args.field)
    if args.gamma is not None:
        gamma = parse_matrix(F, _json_arg(args.gamma))
        if len(gamma) % 2:
            raise FormatError("gamma must be 2m x 2m")
    else:
        gamma = random_gamma0_4(F, args.m, random.Random(args.seed))
    m = len(gamma) // 2
    prec = args.precision or 80
    z = _complex(args.z)
    zm = [[z if j == k else 0 for k in range(m)] for j in range(m)]
    res = theta_transform_residual(F, gamma, zm, prec)
    rep.payload = {"gamma": matrix_json(gamma), "residual_upper": _num(res)}
    rep.cert("theta_transform", res <= 1e-6, f"residual <= {_num(res)}")


# ---------------------------------------------------------------------
# local commands


def _word(args, F: LocalField):
    return None if args.word is None else parse_word(F, _json_arg(args.word))


def cmd_weil_matrix(args, rep: Report):
    F, m, i = _local(args), args.m, args.level
    word = _word(args, F)
    if word is not None:
        M = level_matrix(word, F, m, i)
        rep.payload = {"local": F.to_json(), "m": m, "level": i, "matrix": M.to_json()}
        rep.cert("unitarity", M.is_unitary())
        return
    rep.payload = {"local": F.to_json(), "m": m, "level": i, "dimension": F.q ** (m * (F.e - i)),
                   "generators": [t.to_json() for t in checks.level_tokens(F, m, i)]}
    for name, fn in (("unitarity", checks.unitarity), ("usharp_eigen", checks.usharp_eigen),
                     ("fourier_law", checks.fourier_law)):
        r = fn(F, m, i)
        rep.cert(name, r["passed"], f"{r['checked']} checked")


def cmd_weil_character(args, rep: Report):
    F, m = _local(args), args.m
    word = _word(args, F)
    if word is not None:
        v = epsilon_char(word, F, m)
        rep.payload = {"epsilon": scalar_json(v)}
        rep.cert("character", v.is_unit_modulus(), "unit modulus")
        return
    r = checks.character_laws(F, m, args.count or 50, args.seed)
    rep.payload = {"checked": r["checked"], "values": [scalar_json(v) for v in r["values"]]}
    rep.cert("character", r["passed"], f"unit modulus {r['unit_modulus']}, "
             f"multiplicativity failures {r['multiplicativity_failures']}")


def cmd_weil_relation(args, rep: Report):
    F, m = _local(args), args.m
    word = _word(args, F)
    if word is not None:
        ok = check_char_relation(word, F, m)
        rep.payload = {"holds": ok}
        rep.cert("char_relation", ok)
        return
    r = checks.character_relation(F, m, args.count or 50, args.seed)
    rep.payload = {"checked": r["checked"]}
    rep.cert("char_relation", r["passed"], f"{r['failures']} failures")


def cmd_weil_gauss(args, rep: Report):
    F, m, i = _local(args), args.m, args.level
    Ss = [_local_sym(F, _json_arg(args.S))] if args.S else checks.random_sym_samples(F, m, args.count or 20, args.seed)
    rows = []
    for S in Ss:
        r = checks.gauss_lemma(F, m, i, S)
        rows.append({"S": [[_local_json(x) for x in row] for row in S],
                     "xi": scalar_json(r["xi"]) if r["xi"] is not None else None})
        rep.cert("gauss_lemma", r["passed"])
    rep.payload = {"local": F.to_json(), "m": m, "level": i, "instances": rows}


def _local_json(x):
    return elt_json(x)


def cmd_weil_commutant(args, rep: Report):
    F, m, i = _local(args), args.m, args.level
    r = checks.irreducibility(F, m, i)
    rep.payload = {"local": F.to_json(), "m": m, "level": i, "commutant_dim": r["commutant_dim"]}
    rep.cert("irreducible", r["passed"], f"dimension {r['commutant_dim']}")


def cmd_weil_closure(args, rep: Report):
    F, m, i = _local(args), args.m, args.level
    try:
        G = checks.closure(F, m, i, args.cap)
    except CapExceeded as exc:
        rep.payload = {"cap": exc.cap}
        rep.cert("closure", False, str(exc))
        return
    rep.payload = {"local": F.to_json(), "m": m, "level": i, "order": G.order}
    if args.dump:
        rep.payload["elements"] = [g.to_json()["rows"] for g in G.elements]
    rep.cert("closure", True, f"order {G.order}")
    rep.cert("negative_identity", G.has_negative_identity())


def cmd_weil_idempotent(args, rep: Report):
    F, m = _local(args), args.m
    try:
        r = checks.idempotence(F, m, args.cap, args.count or 20, args.seed)
    except CapExceeded as exc:
        rep.payload = {"cap": exc.cap}
        rep.cert("closure", False, str(exc))
        return
    rep.payload = {"local": F.to_json(), "m": m, "order": r["order"]}
    rep.cert("closure", True, f"order {r['order']}")
    rep.cert("idempotent", r["failures"] == 0 and r["schur_sums"],
             f"{r['failures']} failing group elements; Schur sums {r['schur_sums']}")
    rep.cert("big_ek", r["big_ek_failures"] == 0, f"{r['big_ek_failures']} failures")


def cmd_weil_key_lemma(args, rep: Report):
    F, m, i = _local(args), args.m, args.level
    if args.S:
        S = _local_sym(F, _json_arg(args.S))
        d = key_lemma_verify(F, m, i, S, details=True)
        rep.payload = {"xi": scalar_json(d["xi"]) if d["xi"] is not None else None,
                       "hypotheses": d["hypotheses"], "aggregation": d["aggregation"],
                       "gamma_d_membership": d["gamma_d_membership"]}
        rep.cert("key_lemma", d["passed"])
        return
    samples = args.count if args.count else (None if F.e == 1 else 10)
    r = checks.key_lemma(F, m, i, samples, args.seed)
    rep.payload = {"local": F.to_json(), "m": m, "level": i, "checked": r["checked"],
                   "xi_values": r["xi_values"], "transversal": samples is None}
    rep.cert("key_lemma", r["passed"], f"{len(r['failures'])} failures of {r['checked']}")


def cmd_weil_index(args, rep: Report):
    F = _local(args)
    if args.a is not None:
        a = _local_elt(F, _json_arg(args.a))
        c = weil_index_certificate(F, a)
        rep.payload = {"a": elt_json(a), "alpha": scalar_json(c["value"]), "level": c["level"]}
        rep.cert("index_stable", c["agrees_next"])
        rep.cert("index_laws", c["eighth_root"], "alpha^8 = 1")
        return
    r = checks.index_laws(F)
    rep.payload = {"local": F.to_json(), "checked": r["checked"],
                   "values": {k: scalar_json(v) for k, v in r["values"].items()}}
    rep.cert("index_laws", r["eighth_power"] and r["square_invariance"] and r["negation"])
    rep.cert("index_stable", r["stabilized"])


COMMANDS = {
    "plus-check": cmd_plus_check,
    "split": cmd_split,
    "jacobi-of-plus": cmd_jacobi_of_plus,
    "plus-of-jacobi": cmd_plus_of_jacobi,
    "compose-theta": cmd_compose_theta,
    "normalize-key": cmd_normalize_key,
    "enumerate-T": cmd_enumerate,
    "eval": cmd_eval,
    "theta-transform": cmd_theta_transform,
}

WEIL = {
    "matrix": cmd_weil_matrix,
    "character": cmd_weil_character,
    "relation": cmd_weil_relation,
    "gauss": cmd_weil_gauss,
    "commutant": cmd_weil_commutant,
    "closure": cmd_weil_closure,
    "idempotent": cmd_weil_idempotent,
    "key-lemma": cmd_weil_key_lemma,
    "index": cmd_weil_index,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--field", default="Q", help="Q or Q(sqrtd)")
    common.add_argument("--m", type=int, default=1)
    common.add_argument("--eta", default="-1")
    common.add_argument("--bound", default="20", help="trace bound")
    common.add_argument("--local", default="q2", choices=("q2", "q4", "q2sqrt2"))
    common.add_argument("--level", type=int, default=0)
    common.add_argument("--precision", type=int, default=None, help="bits")
    common.add_argument("--cap", type=int, default=100000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)

    p = _Parser(prog="plusspace", description="Plus-space and 2-adic Weil representation certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("split", "jacobi-of-plus", "plus-of-jacobi", "compose-theta"):
        sub.add_parser(name, parents=[common]).add_argument("input", help="expansion JSON file or -")
    sub.add_parser("plus-check", parents=[common]).add_argument("input", nargs="?", default=None)
    nk = sub.add_parser("normalize-key", parents=[common])
    nk.add_argument("matrix", help="N as JSON (T with --inverse)")
    nk.add_argument("vector", help="r as JSON (lambda with --inverse)")
    nk.add_argument("--inverse", action="store_true")
    sub.add_parser("enumerate-T", parents=[common])
    ev = sub.add_parser("eval", parents=[common])
    ev.add_argument("input")
    ev.add_argument("--z", default="1j", help="z = this number times the identity")
    ev.add_argument("--w", default=None, help="comma-separated coordinates of w")
    tt = sub.add_parser("theta-transform", parents=[common])
    tt.add_argument("--gamma", default=None, help="2m x 2m matrix JSON; seeded random if absent")
    tt.add_argument("--z", default="2j")

    weil = sub.add_parser("weil").add_subparsers(dest="weil_command", required=True, parser_class=_Parser)
    for name in WEIL:
        w = weil.add_parser(name, parents=[common])
        w.add_argument("--word", default=None, help="word JSON or @file")
        w.add_argument("--S", default=None, help="symmetric matrix JSON")
        w.add_argument("--a", default=None, help="local element JSON")
        w.add_argument("--count", type=int, default=None, help="number of seeded samples")
        w.add_argument("--dump", action="store_true", help="include group elements")
    return p


MATH_FAILURES = (NotEigenvector, InvarianceViolation, NoStabilization, NotPlusSupported, AssertionError)
INPUT_ERRORS = (FormatError, UsageError, NotInGroup, GlobalNotInGroup, InvalidExpansion, NotHalfIntegral,
                WindowTooSmall, OrderCapExceeded, TailBoundTooLarge, ValueError, ZeroDivisionError)


def _emit(doc: dict, out: str | None):
    text = dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = None
    try:
        args = build_parser().parse_args(argv)
        out = args.out
        name = args.command if args.command != "weil" else f"weil {args.weil_command}"
        fn = COMMANDS[args.command] if args.command != "weil" else WEIL[args.weil_command]
        rep = Report(name)
        try:
            fn(args, rep)
        except MATH_FAILURES as exc:
            rep.cert(type(exc).__name__, False, str(exc))
        _emit(rep.to_json(), out)
        return 0 if rep.status() == "ok" else 1
    except INPUT_ERRORS as exc:
        doc = {"command": " ".join(argv[:2]), "status": "error", "payload": {}, "certificates": [],
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        for key in ("line", "col", "pos"):
            if getattr(exc, key, None) is not None:
                doc["error"][key] = getattr(exc, key)
        _emit(doc, out)
        return 2


if __name__ == "__main__":
    sys.exit(main())
