"""``seifert`` command line front end.

Exit codes: 0 ok, 1 invariant violation, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .classify import classify_seifert, classify_triple
from .errors import InputError, InvariantViolation, SeifertError
from .flbundle import (
    ElementarySection,
    Lattice,
    check_thm52,
    fl_elementary,
    fl_lattice,
    gamma_of_filtration,
    hodge_from_lattice,
    parse_generator,
    quadrature_fl,
    twisted_hodge_from_fl_lattice,
)
from .gamma_twist import sqrt_tate_twist, tate_twist_residuals, verify_thm43
from .hodge import Filtration, SteenbrinkMHS, SteenbrinkPMHS, check_pmhs, make_split_pmhs
from .linalg_core import MatrixQ, Subspace, jordan_parts, to_fraction
from .seifert import IsometricTriple, SeifertFormPair
from .thomseb import TEZPData, fixture, suspend, tensor_tezp

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


# ---------------------------------------------------------------------------
# numbers and matrices


def _entry(x):
    if isinstance(x, bool) or x is None:
        raise InputError(f"not a number: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip().replace(" ", "")
        if "j" in s or "i" in s:
            try:
                return complex(s.replace("i", "j"))
            except ValueError:
                raise InputError(f"cannot parse complex number {x!r}") from None
        return to_fraction(s)
    raise InputError(f"not a number: {x!r}")


def parse_matrix(obj, square: bool = True):
    """MatrixQ if every entry is exact, else a complex ndarray."""
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InputError("matrix must be a nonempty list of rows")
    rows = [[_entry(x) for x in r] for r in obj]
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError("ragged matrix")
    if square and width != len(rows):
        raise InputError("matrix must be square")
    if all(isinstance(x, Fraction) for r in rows for x in r):
        return MatrixQ.from_any(rows)
    return np.array([[complex(x) for x in r] for r in rows])


def _array(m) -> np.ndarray:
    a = m.to_array(float) if isinstance(m, MatrixQ) else np.asarray(m)
    if np.iscomplexobj(a) and np.abs(a.imag).max(initial=0) == 0:
        a = a.real
    return a


def num_json(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    x = complex(x)
    if abs(x.imag) <= 1e-14 * max(1.0, abs(x.real)):
        r = x.real
        return int(r) if r == int(r) and abs(r) < 2 ** 53 else r
    return f"{x.real!r}{x.imag:+}j"


def matrix_json(m) -> list:
    if isinstance(m, MatrixQ):
        return [[num_json(x) for x in r] for r in m.entries]
    return [[num_json(x) for x in r] for r in np.atleast_2d(m)]


# ---------------------------------------------------------------------------
# documents


def load_document(arg: str):
    """A path, '-' for stdin, inline JSON, or a fixture name."""
    if arg == "-":
        text = sys.stdin.read()
    elif os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = arg
    text = text.strip()
    if text.startswith("[") or text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from None
    return {"kind": "fixture", "name": text}


def _check_version(doc: dict):
    v = doc.get("schema_version", SCHEMA_VERSION)
    if str(v) != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {v!r}")


def _int(doc: dict, key: str) -> int:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise InputError(f"field {key!r} must be an integer")
    return v


def pmhs_from_json(doc: dict, tol=None, cluster_tol=None) -> SteenbrinkPMHS:
    _check_version(doc)
    m = _int(doc, "m")
    signed = bool(doc.get("signed", False))
    if "spec" in doc:
        entries = []
        for e in doc["spec"]:
            if not isinstance(e, list) or len(e) != 4:
                raise InputError("spec entries are [p, q, beta or lambda, multiplicity]")
            p, q, b, d = e
            b = _entry(b) if isinstance(b, str) else (Fraction(b) if isinstance(b, int) else b)
            entries.append((int(p), int(q), b, int(d)))
        rng = np.random.default_rng(doc["seed"]) if "seed" in doc else None
        return make_split_pmhs(entries, m, signed, rng=rng, base_change=rng is not None, tol=tol)
    for key in ("M", "S", "F"):
        if key not in doc:
            raise InputError(f"PMHS document needs {key!r} (or a 'spec')")
    M = _array(parse_matrix(doc["M"]))
    S = _array(parse_matrix(doc["S"]))
    n = M.shape[0]
    if S.shape != (n, n):
        raise InputError("M and S have different sizes")
    if not isinstance(doc["F"], dict):
        raise InputError("F maps p to a list of spanning vectors")
    steps = {}
    for k, vecs in doc["F"].items():
        try:
            p = int(k)
        except ValueError:
            raise InputError(f"bad Hodge index {k!r}") from None
        if vecs:
            B = _array(parse_matrix(vecs, square=False)).T
            if B.shape[0] != n:
                raise InputError("Hodge vector has the wrong length")
            steps[p] = Subspace(n, B)
        else:
            steps[p] = Subspace.zero(n)
    if "real_basis" in doc:
        R = _array(parse_matrix(doc["real_basis"]))
        try:
            Ri = np.linalg.inv(R)
        except np.linalg.LinAlgError:
            raise InputError("real_basis is singular") from None
        M = Ri @ M @ R
        S = R.T @ S @ R
        steps = {p: v.image(Ri) for p, v in steps.items()}
    F = Filtration(steps, True, Subspace.full(n))
    return SteenbrinkPMHS(SteenbrinkMHS(M, F, m, tol, cluster_tol), S, signed)


def pmhs_to_json(p: SteenbrinkPMHS) -> dict:
    F = p.F
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "pmhs",
        "m": p.m,
        "signed": p.signed,
        "M": matrix_json(p.M),
        "S": matrix_json(p.S),
        "F": {str(k): [[num_json(x) for x in v] for v in F[k].basis.T] for k in F.indices(0)},
    }


def tezp_from_json(doc: dict, tol=None, cluster_tol=None) -> TEZPData:
    kind = doc.get("kind")
    if kind == "fixture":
        return fixture(str(doc.get("name", "")))
    if kind == "pmhs":
        from .thomseb import tezp_from_pmhs

        return tezp_from_pmhs(pmhs_from_json(doc, tol, cluster_tol), with_lattice=False)
    _check_version(doc)
    if "L" not in doc:
        raise InputError("TEZP document needs 'L' and 'm'")
    L = parse_matrix(doc["L"])
    form = SeifertFormPair.from_gram(L if isinstance(L, MatrixQ) else _array(L), tol)
    t = TEZPData(form, _int(doc, "m"))
    if "pmhs" in doc:
        t.pmhs = pmhs_from_json(doc["pmhs"], tol, cluster_tol)
    return t


def tezp_to_json(t: TEZPData) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "tezp",
        "m": t.m,
        "mu": t.mu,
        "L": matrix_json(t.L.exact if t.L.exact is not None else t.L.gram),
        "L_hnor": matrix_json(t.L_hnor.exact if t.L_hnor.exact is not None else t.L_hnor.gram),
        "classification": classify_seifert(t.L_hnor).to_json(),
    }
    if t.pmhs is not None:
        out["pmhs"] = pmhs_to_json(t.pmhs)
        out["spectral_pairs"] = t.pmhs.spectral_pairs().to_json()
    return out


def _pmhs_arg(arg: str, args) -> SteenbrinkPMHS:
    doc = load_document(arg)
    if not isinstance(doc, dict):
        raise InputError("expected a PMHS document or fixture name")
    if doc.get("kind") in ("fixture", "tezp"):
        t = tezp_from_json(doc, args.tol, args.cluster_tol)
        if t.pmhs is None:
            raise InputError("this input carries no Hodge data")
        p = t.pmhs
    else:
        p = pmhs_from_json(doc, args.tol, args.cluster_tol)
    if getattr(args, "signed", None) is not None:
        p = SteenbrinkPMHS(p.mhs, p.S, args.signed)
    return p


# ---------------------------------------------------------------------------
# commands


def _emit(args, payload, text_lines):
    if args.json:
        print(json.dumps(payload, indent=None if args.compact else 2, sort_keys=False))
    else:
        for line in text_lines:
            print(line)


def cmd_classify(args) -> int:
    doc = load_document(args.input)
    if isinstance(doc, dict) and doc.get("kind") in ("fixture", "tezp"):
        t = tezp_from_json(doc, args.tol, args.cluster_tol)
        dec = classify_seifert(t.L_hnor, args.tol, args.cluster_tol)
    elif args.triple:
        if not isinstance(doc, dict) or not {"S", "M", "sym"} <= set(doc):
            raise InputError("triple input is {\"S\": ..., \"M\": ..., \"sym\": 0|1}")
        T = IsometricTriple.build(_array(parse_matrix(doc["S"])), _array(parse_matrix(doc["M"])), _int(doc, "sym"), args.tol)
        dec = classify_triple(T, args.tol, args.cluster_tol)
    else:
        gram = doc.get("L") if isinstance(doc, dict) else doc
        L = parse_matrix(gram)
        dec = classify_seifert(L if isinstance(L, MatrixQ) else _array(L), args.tol, args.cluster_tol)
    _emit(args, {"schema_version": SCHEMA_VERSION, "decomposition": dec.to_json()}, dec.lines())
    return EXIT_OK


def _spp_lines(spp) -> list[str]:
    out = []
    for a_num, a_den, k, mult in spp:
        a = f"{a_num}/{a_den}" if a_den not in (None, 1) else str(a_num)
        out.append(f"({a}, {k}) x{mult}")
    return out


def cmd_spectrum(args) -> int:
    p = _pmhs_arg(args.input, args)
    spp = sorted(p.spectral_pairs().to_json(), key=lambda r: (r[0] / (r[1] or 1), r[2]))
    _emit(args, {"schema_version": SCHEMA_VERSION, "spectral_pairs": spp}, _spp_lines(spp))
    return EXIT_OK


def _report_lines(title, rep) -> list[str]:
    lines = [f"{title}: {'ok' if rep.ok else 'FAILED'}"]
    for e in rep.entries:
        res = "" if e.residual is None else f"  residual={e.residual:.3g}"
        lines.append(f"  [{'pass' if e.passed else 'FAIL'}] {e.name}{res}")
    return lines


def cmd_verify(args) -> int:
    p = _pmhs_arg(args.input, args)
    reps = {"pmhs": check_pmhs(p, args.tol)}
    if reps["pmhs"].ok:
        reps["normalized_seifert"] = verify_thm43(p, args.tol)
    lines = []
    for k, r in reps.items():
        lines += _report_lines(k, r)
    ok = all(r.ok for r in reps.values())
    _emit(args, {"schema_version": SCHEMA_VERSION, "ok": ok, "reports": {k: r.to_json() for k, r in reps.items()}}, lines)
    return EXIT_OK if ok else EXIT_VIOLATION


def _tezp_lines(t: TEZPData) -> list[str]:
    lines = [f"m = {t.m}, mu = {t.mu}, tier = {t.tier}", "L^hnor classification:"]
    lines += ["  " + s for s in classify_seifert(t.L_hnor).lines()]
    if t.pmhs is not None:
        lines.append("spectral pairs:")
        lines += ["  " + s for s in _spp_lines(t.pmhs.spectral_pairs().to_json())]
    return lines


def _tezp_arg(arg: str, args) -> TEZPData:
    doc = load_document(arg)
    if not isinstance(doc, dict):
        raise InputError("expected a TEZP document, PMHS document or fixture name")
    return tezp_from_json(doc, args.tol, args.cluster_tol)


def _strip_lattice(t: TEZPData) -> TEZPData:
    t.lattice = None
    return t


def cmd_tensor(args) -> int:
    a, b = _tezp_arg(args.a, args), _tezp_arg(args.b, args)
    if a.tier != b.tier and args.drop_analytic:
        a = TEZPData(a.L, a.m)
        b = TEZPData(b.L, b.m)
    t = tensor_tezp(_strip_lattice(a), _strip_lattice(b))
    _emit(args, tezp_to_json(t), _tezp_lines(t))
    return EXIT_OK


def cmd_suspend(args) -> int:
    t = _tezp_arg(args.input, args)
    for _ in range(args.times):
        t = suspend(_strip_lattice(t))
    _emit(args, tezp_to_json(t), _tezp_lines(t))
    return EXIT_OK


def cmd_twist(args) -> int:
    p0 = _pmhs_arg(args.input, args)
    p = p0
    for _ in range(args.times):
        p = sqrt_tate_twist(p, args.tol)
    payload = pmhs_to_json(p)
    lines = [f"m = {p.m}, signed = {p.signed}"] + _spp_lines(p.spectral_pairs().to_json())
    code = EXIT_OK
    if args.check:
        res = {"spectral_shift": 0.0}
        expected = p0.spectral_pairs().shifted(Fraction(args.times, 2), args.times)
        res["spectral_shift"] = 0.0 if p.spectral_pairs() == expected else 1.0
        if args.times == 2:
            res.update(tate_twist_residuals(p0, p))
        tol = args.tol or 1e-8
        ok = all(v <= max(tol, 1e-8) for v in res.values())
        payload["check"] = {"ok": ok, "residuals": res}
        lines.append(f"check: {'ok' if ok else 'FAILED'} " + ", ".join(f"{k}={v:.3g}" for k, v in res.items()))
        code = EXIT_OK if ok else EXIT_VIOLATION
    _emit(args, payload, lines)
    return code


def cmd_fixture(args) -> int:
    t = fixture(args.name)
    _emit(args, tezp_to_json(t), _tezp_lines(t))
    return EXIT_OK


def _lattice_check(doc: dict, args) -> tuple[bool, dict, list[str]]:
    m = _int(doc, "m")
    M = _array(parse_matrix(doc["M"]))
    parts = jordan_parts(M, args.tol, args.cluster_tol)
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens:
        raise InputError("lattice needs a nonempty 'generators' list")
    lat = Lattice([parse_generator(g) for g in gens], parts.N, "tau",
                  to_fraction(doc["cutoff"]) if "cutoff" in doc else None)
    F = hodge_from_lattice(lat, m, parts)
    GF = twisted_hodge_from_fl_lattice(fl_lattice(lat), m, parts)
    gap = GF.max_gap(gamma_of_filtration(F, parts))
    ok = gap < 1e-8
    dims = {str(k): F[k].dim for k in F.indices()}
    lines = [f"F^p dims: {dims}", f"z-side comparison: {'ok' if ok else 'FAILED'} (gap {gap:.3g})"]
    return ok, {"hodge_dims": dims, "z_side_gap": gap}, lines


def cmd_fl_check(args) -> int:
    doc = load_document(args.input)
    if isinstance(doc, dict) and doc.get("kind") == "lattice":
        ok, payload, lines = _lattice_check(doc, args)
    else:
        p = _pmhs_arg(args.input, args)
        rep = check_thm52(p)
        quad = 0.0
        N = p.mhs.N
        for g in p.mhs.groups:
            if float(g.beta) < 1 / 6:
                continue
            s = ElementarySection(g.space.basis[:, 0], g.beta - 1)
            closed = fl_elementary(s, N)
            for z in (1.0, 2j, -1 + 1j):
                q = quadrature_fl(s, z, N)
                quad = max(quad, float(np.abs(q - closed.evaluate(np.log(complex(z)), N)).max()))
        ok = rep.ok and quad < 1e-6
        payload = {"pairing": rep.to_json(), "quadrature_max_error": quad}
        lines = _report_lines("pairing", rep) + [f"quadrature max error: {quad:.3g}"]
    payload = {"schema_version": SCHEMA_VERSION, "ok": ok, **payload}
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# parser


def _positive_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--compact", action="store_true", help="single-line JSON")
    common.add_argument("--tol", type=_positive_float, default=None, help="numerical tolerance (default: $SEIFERT_TOL or 1e-9)")
    common.add_argument("--cluster-tol", type=_positive_float, default=None, help="eigenvalue clustering radius")

    ap = argparse.ArgumentParser(prog="seifert", description="Seifert forms, isometric triples and Steenbrink PMHS.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="decompose a Seifert form or isometric triple")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--seifert", action="store_true", help="input is a Gram matrix (default)")
    g.add_argument("--triple", action="store_true", help="input is {S, M, sym}")
    c.add_argument("input", help="JSON text, file path, '-' or fixture name")
    c.set_defaults(func=cmd_classify)

    for name, func, helptext in (
        ("spectrum", cmd_spectrum, "spectral pairs of a PMHS"),
        ("verify", cmd_verify, "check PMHS axioms and the normalized Seifert form identities"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("input")
        sg = s.add_mutually_exclusive_group()
        sg.add_argument("--signed", dest="signed", action="store_true", default=None)
        sg.add_argument("--unsigned", dest="signed", action="store_false")
        s.set_defaults(func=func)

    t = sub.add_parser("tensor", parents=[common], help="Thom-Sebastiani sum of two inputs")
    t.add_argument("a")
    t.add_argument("b")
    t.add_argument("--drop-analytic", action="store_true", help="fall back to lattice data when tiers differ")
    t.set_defaults(func=cmd_tensor)

    s = sub.add_parser("suspend", parents=[common], help="add x^2")
    s.add_argument("input")
    s.add_argument("--times", type=int, default=1)
    s.set_defaults(func=cmd_suspend)

    w = sub.add_parser("twist", parents=[common], help="square root of a Tate twist")
    w.add_argument("input")
    w.add_argument("--times", type=int, default=1)
    w.add_argument("--check", action="store_true", help="compare against the expected shifts")
    w.add_argument("--signed", dest="signed", action="store_true", default=None)
    w.set_defaults(func=cmd_twist)

    f = sub.add_parser("fixture", parents=[common], help="named examples: p1-mirror, t-pqr:p,q,r, a1")
    f.add_argument("name")
    f.set_defaults(func=cmd_fixture)

    fl = sub.add_parser("fl-check", parents=[common], help="Fourier-Laplace and pairing identities")
    fl.add_argument("input", help="PMHS document, fixture name, or lattice document")
    fl.set_defaults(func=cmd_fl_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        if args.tol is None:
            from .linalg_core import default_tol

            default_tol()  # validates $SEIFERT_TOL
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (InputError, SeifertError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, TypeError, KeyError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
