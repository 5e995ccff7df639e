"""Command line front end: ``witten dims|char|volumes|pairing|witten-volume|verify``.

Exit codes: 0 success, 1 input error, 2 reported divergence (or an exhausted
term budget), 3 a verification suite failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Callable, Sequence

from . import numeric
from .engine import PairingSpec, Summation, default_threads, sum_pairing
from .deformation import BetaSpec, DeformedP
from .lie import RootSystemError, build_root_system
from .problem import (
    InputError,
    build_spec,
    dumps,
    load_document,
    load_group,
    load_problem,
    parse_rational,
    result_document,
    validate_result,
)
from .series import GeneratorTable
from .volumes import (
    char_value,
    make_marking,
    vol_conjugacy_class,
    vol_G,
    vol_G_over_K,
    vol_G_over_T,
    weyl_dim,
)

EXIT_OK, EXIT_INPUT, EXIT_DIVERGED, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _table(rows: Sequence[Sequence[str]], out=None) -> None:
    out = out or sys.stdout
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        out.write("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip() + "\n")


def _fmt(x) -> str:
    if isinstance(x, complex) or hasattr(x, "imag"):
        c = complex(x)
        if c.imag == 0:
            return f"{c.real:.15g}"
        return f"{c.real:.15g}{c.imag:+.15g}i"
    return f"{float(x):.15g}"


def _split_vectors(text: str, where: str, rational: bool) -> list:
    out = []
    for i, chunk in enumerate(filter(None, (c.strip() for c in text.split(";")))):
        parts = [p.strip() for p in chunk.split(",")]
        if rational:
            out.append(tuple(parse_rational(p, f"{where}[{i}][{j}]") for j, p in enumerate(parts)))
        else:
            try:
                out.append(tuple(int(p) for p in parts))
            except ValueError:
                raise InputError(f"{where}[{i}]: malformed integer vector {chunk!r}") from None
    return out


def _group_and_lists(args, need_points: bool):
    """Group, weights and points from --input or from the inline flags."""
    if args.input:
        problem = load_problem(_read(args.input), args.allow_e8)
        return problem.rs, problem.weights(), problem.points()
    if not args.group:
        raise InputError("--group or --input is required")
    doc = {"group": {"type": args.group, "scale": args.scale}}
    rs = load_group(load_document(json.dumps(doc)), args.allow_e8)
    weights = _split_vectors(getattr(args, "weights", None) or "", "--weights", False)
    points = _split_vectors(args.mu or "", "--mu", True) if need_points else []
    for i, w in enumerate(weights):
        if len(w) != rs.rank or min(w) < 0:
            raise InputError(f"--weights[{i}]: expected {rs.rank} non-negative integers")
    for i, p in enumerate(points):
        if len(p) != rs.rank:
            raise InputError(f"--mu[{i}]: expected {rs.rank} coordinates")
    return rs, weights, points


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _write(path: str | None, doc: dict) -> None:
    text = dumps(doc) + "\n"
    validate_result(json.loads(text))
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(path: str | None, doc: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc) + "\n")


# ------------------------------------------------------------------ commands


def cmd_dims(args) -> int:
    rs, weights, _ = _group_and_lists(args, False)
    rows = [["lambda", "dim"]]
    out = []
    for w in weights:
        d = weyl_dim(rs, w)
        rows.append([",".join(map(str, w)), str(d)])
        out.append({"lambda": list(w), "dim": d})
    _table(rows)
    _emit_json(args.out, {"group": rs.label, "dims": out})
    return EXIT_OK


def cmd_char(args) -> int:
    rs, weights, points = _group_and_lists(args, True)
    rows = [["lambda", "mu", "chi"]]
    out = []
    for p in points:
        marking = make_marking(rs, p)
        for w in weights:
            c = complex(char_value(rs, w, marking))
            rows.append([",".join(map(str, w)), ",".join(map(str, p)), _fmt(c)])
            out.append({"lambda": list(w), "mu": [str(x) for x in p], "value": [c.real, c.imag]})
    _table(rows)
    _emit_json(args.out, {"group": rs.label, "characters": out})
    return EXIT_OK


def cmd_volumes(args) -> int:
    rs, _, points = _group_and_lists(args, True)
    rows = [["quantity", "value"], ["vol(G/T)", _fmt(vol_G_over_T(rs))], ["vol(G)", _fmt(vol_G(rs))]]
    out = {"group": rs.label, "vol_G_over_T": float(vol_G_over_T(rs)), "vol_G": float(vol_G(rs)), "classes": []}
    for p in points:
        m = make_marking(rs, p)
        label = ",".join(map(str, p))
        gk, vc = vol_G_over_K(rs, m.k_roots), vol_conjugacy_class(rs, m)
        rows.append([f"vol(G/K) at mu={label}", _fmt(gk)])
        rows.append([f"Vol(C) at mu={label}", _fmt(vc)])
        out["classes"].append({"mu": [str(x) for x in p], "dim_C": 2 * m.half_dim, "vol_G_over_K": float(gk), "vol_C": float(vc)})
    _table(rows)
    _emit_json(args.out, out)
    return EXIT_OK


def _run_pairing(spec: PairingSpec, precision: str, args) -> int:
    digits = numeric.EXTENDED_DIGITS if precision == "extended" else None
    threads = args.threads if args.threads is not None else default_threads()
    with numeric.working_precision(digits):
        result = sum_pairing(spec, threads=threads)
        doc = result_document(result, spec, precision)
        _write(args.out, doc)
    rows = [["monomial", "re", "im"]]
    for k, (re, im) in doc["coefficients"].items():
        rows.append([k, f"{float(re):.17g}", f"{float(im):.17g}"])
    _table(rows)
    d = doc["diagnostics"]
    sys.stdout.write(f"mode={d['mode']} status={d['status']} terms={d['terms_summed']} tail_bound={float(d['tail_bound']):.3g}\n")
    sys.stderr.write(f"wallclock {result.wallclock:.3f} s\n")
    if result.status in ("diverged", "budget_exhausted"):
        sys.stderr.write(f"summation {result.status}\n")
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_pairing(args) -> int:
    if not args.input:
        raise InputError("--input is required")
    problem = load_problem(_read(args.input), args.allow_e8)
    spec = build_spec(problem)
    return _run_pairing(spec, args.precision or problem.precision, args)


def cmd_witten_volume(args) -> int:
    if args.input:
        problem = load_problem(_read(args.input), args.allow_e8)
        rs, genus = problem.rs, problem.doc.get("genus", args.genus)
    else:
        if not args.group:
            raise InputError("--group or --input is required")
        rs = load_group(load_document(json.dumps({"group": {"type": args.group, "scale": args.scale}})), args.allow_e8)
        genus = args.genus
    table = GeneratorTable((), (), 0)
    try:
        spec = PairingSpec(rs, genus, [], DeformedP(rs, []), BetaSpec(), table, Summation(tolerance=args.tolerance))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return _run_pairing(spec, args.precision or "double", args)


def cmd_verify(args) -> int:
    from .verify import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SUITES for n in names):
        raise InputError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)} or all")
    ok = True
    for n in names:
        for label, err, tol in SUITES[n]():
            passed = err <= tol
            ok &= passed
            sys.stdout.write(f"{'PASS' if passed else 'FAIL'}  {n}: {label}  error={err:.3g} tol={tol:.1g}\n")
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="problem file (JSON)")
    common.add_argument("--out", help="write the JSON result here")
    common.add_argument("--precision", choices=["double", "extended"])
    common.add_argument("--threads", type=int, help="worker threads (default: $WITTEN_THREADS or 1)")
    common.add_argument("--allow-e8", action="store_true", help="permit E8 problems")
    common.add_argument("--group", help="group label such as A2 (instead of --input)")
    common.add_argument("--scale", default="1", help="inner product scale (rational)")

    parser = _Parser(prog="witten", description="Intersection pairings on moduli spaces of flat connections.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("dims", parents=[common], help="Weyl dimensions")
    p.add_argument("--weights", help='highest weights, e.g. "0,0;1,1"')
    p = sub.add_parser("char", parents=[common], help="character values chi_lambda(exp mu)")
    p.add_argument("--weights")
    p.add_argument("--mu", help='alcove points, e.g. "1/3,0"')
    p = sub.add_parser("volumes", parents=[common], help="volumes of G, G/T and conjugacy classes")
    p.add_argument("--mu")
    sub.add_parser("pairing", parents=[common], help="sum the localization formula for a problem file")
    p = sub.add_parser("witten-volume", parents=[common], help="symplectic volume of the moduli space (no markings)")
    p.add_argument("--genus", type=int, default=2)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p = sub.add_parser("verify", parents=[common], help="run oracle suites")
    p.add_argument("suite", help="suite name or 'all'")
    return parser


COMMANDS: dict[str, Callable] = {
    "dims": cmd_dims,
    "char": cmd_char,
    "volumes": cmd_volumes,
    "pairing": cmd_pairing,
    "witten-volume": cmd_witten_volume,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    if args.threads is not None and args.threads < 1:
        sys.stderr.write("witten: error: --threads must be positive\n")
        return EXIT_INPUT
    try:
        scale = parse_rational(args.scale, "--scale")
        args.scale = str(scale)
        return COMMANDS[args.command](args)
    except InputError as exc:
        sys.stderr.write(f"witten: input error: {exc}\n")
        return EXIT_INPUT
    except (RootSystemError, ValueError) as exc:
        sys.stderr.write(f"witten: input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
