"""Command-line surface: exact JSON in, exact JSON out.

Commands: check, double, product, coproduct, rmatrix, polarize, quantize-r,
quantize-qt, eval, selftest.  All numeric payloads are rational strings and
all JSON output is byte-deterministic for identical inputs (timing is
reported on stderr only).  Exit codes: 0 success, 1 a verification check
failed, 2 usage, 3 malformed input file, 4 unknown basis label, 5 truncation
order not supported.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import acyc, bialg, selftest
from .assoc import AssocError
from .kernel import DEFAULT_ORDER, HSeries, Q, rat, rat_str
from .manin import build_double
from .pbw import EnvElement, EnvTensor
from .quantize import Quantization, polarize_R
from .ybq import (
    AssocAlgebra,
    YangBaxterError,
    env_qybe_residual,
    env_unitarity_residual,
    quantize_quasitriangular,
    quantize_r,
    qybe_residual,
    unitarity_residual,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 3
EXIT_UNKNOWN_LABEL = 4
EXIT_BAD_ORDER = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _digest(data) -> str:
    blob = json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read JSON from {path}: {exc}", EXIT_BAD_INPUT)


def load_bialgebra(path: str):
    data = load_json(path)
    try:
        return bialg.from_json(data), data
    except bialg.BialgebraError as exc:
        raise CliError(f"{path}: {exc}", EXIT_BAD_INPUT)


def load_assoc(path: str):
    data = load_json(path)
    try:
        dim = int(data["dim"])
        names = tuple(data.get("basis") or [f"e{i+1}" for i in range(dim)])
        mult: dict = {}
        for rec in data.get("mult", []):
            key = (rec["i"] - 1, rec["j"] - 1)
            mult.setdefault(key, {})[rec["k"] - 1] = \
                mult.get(key, {}).get(rec["k"] - 1, Q(0)) + rat(rec["coeff"])
        unit = tuple(rat(v) for v in data["unit"])
        return AssocAlgebra(dim, names, mult, unit), data
    except (KeyError, TypeError, ValueError, YangBaxterError) as exc:
        raise CliError(f"{path}: malformed associative algebra: {exc}", EXIT_BAD_INPUT)


def load_two_tensor(path: str, dim: int):
    data = load_json(path)
    entries = data["entries"] if isinstance(data, dict) and "entries" in data else data
    out = {}
    try:
        for rec in entries:
            i, j = rec["i"] - 1, rec["j"] - 1
            if not (0 <= i < dim and 0 <= j < dim):
                raise CliError(f"{path}: tensor index out of range", EXIT_BAD_INPUT)
            out[(i, j)] = out.get((i, j), Q(0)) + rat(rec["coeff"])
    except (KeyError, TypeError) as exc:
        raise CliError(f"{path}: malformed tensor: {exc}", EXIT_BAD_INPUT)
    return {k: v for k, v in out.items() if v != 0}, data


def parse_word(text: str, names) -> tuple[int, ...]:
    """A product of basis labels, e.g. "a2,a2" or "a1 a2" ("1" is the unit)."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    labels = [t for t in text.replace(",", " ").replace("*", " ").split() if t]
    index = {n: i for i, n in enumerate(names)}
    word = []
    for label in labels:
        if label not in index:
            raise CliError(f"unknown basis label {label!r} (basis: {list(names)})",
                           EXIT_UNKNOWN_LABEL)
        word.append(index[label])
    return tuple(word)


def element_json(x: EnvElement) -> list:
    return [{"word": [i + 1 for i in w], "coeff": rat_str(c)} for w, c in x.items()]


def tensor_json(t: EnvTensor) -> list:
    return [{"words": [[i + 1 for i in w] for w in key], "coeff": rat_str(c)}
            for key, c in t.items()]


def element_series_json(s: HSeries) -> dict:
    return {"order": s.order, "coeffs": [element_json(c) for c in s.coeffs]}


def tensor_series_json(s: HSeries) -> dict:
    return {"order": s.order, "coeffs": [tensor_json(c) for c in s.coeffs]}


def pair_series_json(s: HSeries) -> dict:
    out = []
    for coeff in s.coeffs:
        out.append([{"indices": [i + 1, j + 1], "coeff": rat_str(v)}
                    for (i, j), v in sorted(coeff.items())])
    return {"order": s.order, "coeffs": out}


def check_entry(name: str, identity: str, defects) -> dict:
    entry = {"name": name, "identity": identity,
             "status": "pass" if not defects else "fail"}
    if defects:
        entry["residual"] = str(defects[0])
    return entry


def emit(report: dict, args, started: float) -> int:
    blob = json.dumps(report, sort_keys=True, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(blob + "\n")
    else:
        print(blob)
    failed = any(c.get("status") == "fail" for c in report.get("checks", []))
    if not args.quiet:
        print(f"{report['command']}: "
              f"{'FAIL' if failed else 'ok'} in {time.perf_counter() - started:.2f}s",
              file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    started = time.perf_counter()
    g, data = load_bialgebra_or_report(args.bialgebra)
    if isinstance(g, bialg.CheckReport):
        report = {
            "command": "check",
            "inputs": {args.bialgebra: _digest(data)},
            "checks": [{
                "name": "lie-bialgebra-axioms",
                "identity": "antisymmetry, Jacobi, co-Jacobi, cocycle",
                "status": "fail",
                "violations": g.to_json()["violations"],
            }],
        }
        return emit(report, args, started)
    families = ("bracket-antisymmetry", "cobracket-antisymmetry",
                "jacobi", "co-jacobi", "cocycle")
    report = {
        "command": "check",
        "inputs": {args.bialgebra: _digest(data)},
        "checks": [check_entry(f, f + " identity", []) for f in families],
    }
    return emit(report, args, started)


def load_bialgebra_or_report(path: str):
    """A valid bialgebra, or the CheckReport explaining why it is not one."""
    data = load_json(path)
    try:
        dim = int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: bialgebra JSON needs a 'dim': {exc}", EXIT_BAD_INPUT)
    try:
        return bialg.from_json(data), data
    except bialg.BialgebraError:
        auto = bool(data.get("auto_antisymmetrize", False))
        try:
            c = bialg._table_from_records(data.get("bracket", []), dim, auto, "bracket")
            f = bialg._table_from_records(data.get("cobracket", []), dim, auto, "cobracket")
        except bialg.BialgebraError as exc:
            raise CliError(f"{path}: {exc}", EXIT_BAD_INPUT)
        return bialg.check_lie_bialgebra(dim, c, f), data


def cmd_double(args) -> int:
    started = time.perf_counter()
    g, data = load_bialgebra(args.bialgebra)
    d = build_double(g)
    result = {
        "dim": d.dim,
        "basis": list(d.env.names),
        "structure": [
            {"i": i + 1, "j": j + 1, "k": k + 1, "coeff": rat_str(v)}
            for (i, j), row in sorted(d.structure.items())
            for k, v in sorted(row.items())
        ],
        "pairing": [[rat_str(v) for v in row] for row in d.pairing],
        "r": [{"indices": [i + 1, j + 1], "coeff": rat_str(v)}
              for (i, j), v in sorted(d.r.items())],
        "omega": [{"indices": [i + 1, j + 1], "coeff": rat_str(v)}
                  for (i, j), v in sorted(d.omega.items())],
    }
    checks = [check_entry(name, desc, []) for name, desc in (
        ("mixed-bracket", "index form agrees with the coadjoint form"),
        ("jacobi", "Jacobi identity on the double"),
        ("pairing", "invariance, symmetry, isotropy of the blocks"),
        ("casimir", "ad-invariance of the Casimir element"),
        ("coboundary", "double cobracket is the coboundary of r"),
    )]
    report = {"command": "double", "inputs": {args.bialgebra: _digest(data)},
              "checks": checks, "result": result}
    return emit(report, args, started)


def cmd_product(args) -> int:
    started = time.perf_counter()
    g, data = load_bialgebra(args.bialgebra)
    qz = Quantization(g, args.order)
    wx = parse_word(args.x, g.names)
    wy = parse_word(args.y, g.names)
    prod = qz.ek_product(qz.env_a.element({wx: Q(1)}), qz.env_a.element({wy: Q(1)}))
    report = {
        "command": "product",
        "inputs": {args.bialgebra: _digest(data), "x": args.x, "y": args.y},
        "checks": [check_entry("classical-term", "h^0 term is the enveloping product",
                               [] if prod[0] == qz.env_a.element({wx: Q(1)})
                               * qz.env_a.element({wy: Q(1)}) else ["mismatch"])],
        "result": element_series_json(prod),
    }
    return emit(report, args, started)


def cmd_coproduct(args) -> int:
    started = time.perf_counter()
    g, data = load_bialgebra(args.bialgebra)
    qz = Quantization(g, args.order)
    wx = parse_word(args.x, g.names)
    cop = qz.ek_coproduct(qz.env_a.element({wx: Q(1)}))
    report = {
        "command": "coproduct",
        "inputs": {args.bialgebra: _digest(data), "x": args.x},
        "checks": [],
        "result": tensor_series_json(cop),
    }
    return emit(report, args, started)


def cmd_rmatrix(args) -> int:
    started = time.perf_counter()
    g, data = load_bialgebra(args.bialgebra)
    qz = Quantization(g, args.order)
    qd = qz.quantized_double
    r_tensor = EnvTensor(qz.d.env, 2,
                         {((i,), (j,)): v for (i, j), v in qz.d.r.items()})
    checks = [
        check_entry("leading-terms", "R = 1 + h r at low order",
                    [] if qd.R[1] == r_tensor else ["mismatch"]),
        check_entry("twist-leading", "J = 1 + h r/2 at low order",
                    [] if qd.J[1] == r_tensor.scale(Q(1, 2)) else ["mismatch"]),
    ]
    report = {
        "command": "rmatrix",
        "inputs": {args.bialgebra: _digest(data)},
        "checks": checks,
        "result": {"basis": list(qz.d.env.names),
                   "R": tensor_series_json(qd.R),
                   "J": tensor_series_json(qd.J)},
    }
    return emit(report, args, started)


def cmd_polarize(args) -> int:
    started = time.perf_counter()
    g, data = load_bialgebra(args.bialgebra)
    qz = Quantization(g, args.order)
    qd = qz.quantized_double
    polarized, R = polarize_R(qd)
    same = all((polarized[k] - R[k]).is_zero() for k in range(qd.order))
    report = {
        "command": "polarize",
        "inputs": {args.bialgebra: _digest(data)},
        "checks": [check_entry("polarization", "factorized R-matrix equals R",
                               [] if same else ["mismatch"])],
        "result": {"basis": list(qz.d.env.names),
                   "R_polarized": tensor_series_json(polarized)},
    }
    return emit(report, args, started)


def cmd_quantize_r(args) -> int:
    started = time.perf_counter()
    A, data = load_assoc(args.algebra)
    r, rdata = load_two_tensor(args.r, A.dim)
    try:
        R = quantize_r(A, r, args.order)
    except YangBaxterError as exc:
        raise CliError(str(exc), EXIT_BAD_INPUT)
    qybe = qybe_residual(A, R)
    unit = unitarity_residual(A, R)
    unitary_in = all(r.get((j, i), Q(0)) == -v for (i, j), v in r.items())
    checks = [
        check_entry("qybe", "quantum Yang-Baxter equation",
                    [k for c in qybe.coeffs for k in c]),
    ]
    if unitary_in:
        checks.append(check_entry("unitarity", "R^op R = 1 for unitary input",
                                  [k for c in unit.coeffs for k in c]))
    report = {
        "command": "quantize-r",
        "inputs": {args.algebra: _digest(data), args.r: _digest(rdata)},
        "checks": checks,
        "result": {"basis": list(A.names), "R": pair_series_json(R)},
    }
    return emit(report, args, started)


def cmd_quantize_qt(args) -> int:
    started = time.perf_counter()
    g, data = load_bialgebra(args.bialgebra)
    r, rdata = load_two_tensor(args.r, g.dim)
    try:
        qt = quantize_quasitriangular(g, r, args.order)
    except YangBaxterError as exc:
        raise CliError(str(exc), EXIT_BAD_INPUT)
    qybe = env_qybe_residual(qt.env_a, qt.R_a)
    checks = [check_entry("qybe", "quantum Yang-Baxter equation",
                          [1] if any(not c.is_zero() for c in qybe.coeffs) else [])]
    unitary_in = all(r.get((j, i), Q(0)) == -v for (i, j), v in r.items())
    if unitary_in:
        unit = env_unitarity_residual(qt.env_a, qt.R_a)
        checks.append(check_entry("unitarity", "R^op R = 1 for unitary input",
                                  [1] if any(not c.is_zero() for c in unit.coeffs) else []))
    report = {
        "command": "quantize-qt",
        "inputs": {args.bialgebra: _digest(data), args.r: _digest(rdata)},
        "checks": checks,
        "result": {"basis": list(g.names), "R": tensor_series_json(qt.R_a)},
    }
    return emit(report, args, started)


def cmd_eval(args) -> int:
    started = time.perf_counter()
    try:
        with open(args.expr, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {args.expr}: {exc}", EXIT_BAD_INPUT)
    data = load_json(args.structure)
    try:
        if "mult" in data:
            A, _ = load_assoc(args.structure)
            r, _ = (load_two_tensor(args.r, A.dim) if args.r
                    else (_entries_from(data.get("r", []), A.dim), None))
            signature = "cyba"
            structure = (A, r)
        else:
            g = bialg.from_json(data)
            if args.r or "r" in data:
                r = (load_two_tensor(args.r, g.dim)[0] if args.r
                     else _entries_from(data.get("r", []), g.dim))
                signature = "qtlba"
                structure = (g, r)
            else:
                signature = "lba"
                structure = g
        expr = acyc.parse(text, signature)
        tensor = acyc.evaluate(expr, structure, signature)
    except (acyc.AcyclicError, bialg.BialgebraError) as exc:
        raise CliError(str(exc), EXIT_BAD_INPUT)
    report = {
        "command": "eval",
        "inputs": {args.expr: _digest(text), args.structure: _digest(data)},
        "checks": [],
        "result": {
            "signature": signature,
            "inputs_arity": tensor.m,
            "outputs_arity": tensor.n,
            "entries": [{"indices": [i + 1 for i in idx], "coeff": rat_str(c)}
                        for idx, c in tensor.items()],
        },
    }
    return emit(report, args, started)


def _entries_from(entries, dim):
    out = {}
    for rec in entries:
        out[(rec["i"] - 1, rec["j"] - 1)] = \
            out.get((rec["i"] - 1, rec["j"] - 1), Q(0)) + rat(rec["coeff"])
    return {k: v for k, v in out.items() if v != 0}


def cmd_selftest(args) -> int:
    started = time.perf_counter()
    suite = selftest.run_all(quiet=True)
    checks = [check_entry(r.name, r.identity, r.defects) for r in suite.results]
    report = {"command": "selftest", "inputs": {}, "checks": checks}
    code = emit(report, args, started)
    if not args.quiet:
        for r in suite.results:
            print(f"{'pass' if r.passed else 'FAIL'}  {r.name} "
                  f"({r.seconds:.1f}s)", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ekq",
        description="Exact quantization of finite-dimensional Lie bialgebras mod h^3.")
    parser.add_argument("--order", type=int, default=DEFAULT_ORDER,
                        help="truncation order (only 1..3 supported; default 3)")
    parser.add_argument("--degree-bound", type=int, default=None,
                        help="override the PBW degree bound for solver tables")
    parser.add_argument("--output", type=str, default=None,
                        help="write the JSON report to this path instead of stdout")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress the human summary on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify the Lie bialgebra axioms")
    p.add_argument("bialgebra")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("double", help="build and verify the Drinfeld double")
    p.add_argument("bialgebra")
    p.set_defaults(fn=cmd_double)

    p = sub.add_parser("product", help="quantized product of two words")
    p.add_argument("bialgebra")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(fn=cmd_product)

    p = sub.add_parser("coproduct", help="quantized coproduct of a word")
    p.add_argument("bialgebra")
    p.add_argument("--x", required=True)
    p.set_defaults(fn=cmd_coproduct)

    p = sub.add_parser("rmatrix", help="universal R-matrix of the double")
    p.add_argument("bialgebra")
    p.set_defaults(fn=cmd_rmatrix)

    p = sub.add_parser("polarize", help="polarized R-matrix and comparison")
    p.add_argument("bialgebra")
    p.set_defaults(fn=cmd_polarize)

    p = sub.add_parser("quantize-r", help="quantize an associative r-matrix")
    p.add_argument("algebra")
    p.add_argument("--r", required=True)
    p.set_defaults(fn=cmd_quantize_r)

    p = sub.add_parser("quantize-qt", help="quasitriangular quantization on U(a)")
    p.add_argument("bialgebra")
    p.add_argument("--r", required=True)
    p.set_defaults(fn=cmd_quantize_qt)

    p = sub.add_parser("eval", help="evaluate an acyclic expression")
    p.add_argument("expr")
    p.add_argument("structure")
    p.add_argument("--r", default=None,
                   help="r-matrix file for the quasitriangular/associative signatures")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("selftest", help="run the full verification suite")
    p.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.order > 3 or args.order < 1:
        print("ekq: truncation orders beyond 3 require associator coefficients "
              "that this tool does not ship", file=sys.stderr)
        return EXIT_BAD_ORDER
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"ekq: {exc}", file=sys.stderr)
        return exc.code
    except (bialg.BialgebraError, YangBaxterError, AssocError) as exc:
        print(f"ekq: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
