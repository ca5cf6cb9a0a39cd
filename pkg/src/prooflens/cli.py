"""Command-line entry point.

Exit codes: 0 on success or when every check passes, 1 when a check fails,
2 on usage, parse or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .analysis import ModulusSpecError, parse_modulus
from .dialectica import nd, render_form, skolemize
from .formula import FormulaError, FormulaFile, classify, parse_file, prenex, render_file
from .harness import ConfigError, default_config, load_config, run_suite
from .jackson import stability_radius, uniqueness_modulus
from .metastability import (
    MetastabilityExhausted,
    MetastabilitySpecError,
    describe,
    load_sequence,
    metastability_search,
    metastable_refine,
    parse_bound,
    problem,
)
from .rational import RationalFormatError, fmt, parse_rational

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rational(name: str, text: str | None, positive: bool = True) -> Fraction:
    if text is None:
        raise UsageError(f"--{name} is required")
    try:
        q = parse_rational(text)
    except RationalFormatError as exc:
        raise UsageError(f"--{name}: {exc}") from None
    if positive and q <= 0:
        raise UsageError(f"--{name} must be positive, got {text}")
    return q


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _formula_file(args: argparse.Namespace) -> FormulaFile:
    return parse_file(_read(args.input))


def _translate(args: argparse.Namespace) -> int:
    ff = _formula_file(args)
    mode = args.mode
    if mode == "classify":
        return _emit_classify(args, ff)
    if mode == "nd":
        text = render_form(nd(ff.formula))
        head = render_file(FormulaFile(ff.signature, ff.formula)).splitlines()[:-1]
        out = "\n".join(head + [text.rstrip("\n")]) + "\n"
    else:
        g = skolemize(ff.formula) if mode == "skolemize" else prenex(ff.formula)
        out = render_file(FormulaFile(ff.signature, g))
    _write(args.out, out)
    return EXIT_OK


def _emit_classify(args: argparse.Namespace, ff: FormulaFile) -> int:
    c = classify(ff.formula)
    _write(args.out, f"{c.value.value}\n")
    return EXIT_OK


def _classify(args: argparse.Namespace) -> int:
    return _emit_classify(args, _formula_file(args))


def _modulus(args: argparse.Namespace) -> int:
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    if args.omega is None:
        raise UsageError("--omega is required")
    try:
        omega = parse_modulus(args.omega)
    except ModulusSpecError as exc:
        raise UsageError(f"--omega: {exc}") from None
    phi = uniqueness_modulus(args.n, omega, _rational("f-l1", args.f_l1))
    lines = []
    if args.eps is not None:
        lines.append(fmt(phi(_rational("eps", args.eps))))
    if args.delta is not None:
        lines.append("radius " + fmt(stability_radius(phi, _rational("delta", args.delta))))
    if not lines:
        raise UsageError("give --eps (modulus value) and/or --delta (stability radius)")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    config = load_config(_read(args.config)) if args.config else default_config()
    if args.tol is not None:
        tol = fmt(_rational("tol", args.tol))
        for inst in config.get("instances", []):
            if isinstance(inst, dict) and inst.get("check") in ("uniqueness", "stability"):
                inst.setdefault("tol", tol)
    report = run_suite(config)
    _write(args.out, report.dumps())
    s = report.summary
    print(f"pass {s['pass']}  fail {s['fail']}  inconclusive {s['inconclusive']}",
          file=sys.stderr)
    return report.exit_code


def _metastable(args: argparse.Namespace) -> int:
    start, values = load_sequence(_read(args.seq))
    if not values:
        raise UsageError("the sequence is empty")
    if args.f is None:
        raise UsageError("--f is required")
    base = Path(args.seq).parent if args.seq and args.seq != "-" else None
    p = problem(values, _rational("eps", args.eps), parse_bound(args.f, base), start)
    refined = metastable_refine(p)
    out = {"problem": describe(p), "refined_F": list(refined.values)}
    try:
        out["result"] = metastability_search(p).to_json()
    except MetastabilityExhausted as exc:
        out["result"] = None
        out["exhausted_at"] = exc.scanned_max
    _write(args.out, json.dumps(out, indent=2) + "\n")
    return EXIT_OK if out["result"] is not None else EXIT_FAIL


def _report(args: argparse.Namespace) -> int:
    try:
        data = json.loads(_read(args.input))
        checks, summary = data["checks"], data["summary"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"not a report: {exc}") from None
    lines = [f"{c['status']:<13} {c['id']}  [{c['lo']}, {c['hi']}]" for c in checks]
    lines.append(f"pass {summary['pass']}  fail {summary['fail']}  "
                 f"inconclusive {summary['inconclusive']}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if summary["fail"] == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prooflens",
                                     description="Proof-mining toolkit: formula translations, "
                                                 "moduli and certified checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str, fn) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.set_defaults(run=fn)
        p.add_argument("--out", help="output path (default: stdout)")
        return p

    p = add("translate", "rewrite a formula file", _translate)
    p.add_argument("--in", dest="input", help="formula file (default: stdin)")
    p.add_argument("--mode", choices=["skolemize", "nd", "prenex", "classify"], default="nd")

    p = add("classify", "print the complexity class of a formula", _classify)
    p.add_argument("--in", dest="input", help="formula file (default: stdin)")

    p = add("modulus", "evaluate the modulus of uniqueness", _modulus)
    p.add_argument("--n", type=int, help="degree bound")
    p.add_argument("--omega", help="modulus of f: linear:c, min:(a,b), pre:c:(a)")
    p.add_argument("--f-l1", dest="f_l1", help="bound on ||f||_1 as p/q")
    p.add_argument("--eps", help="argument of the modulus as p/q")
    p.add_argument("--delta", help="print the stability radius at this delta")

    p = add("verify", "run a check suite and write a JSON report", _verify)
    p.add_argument("--config", help="suite config (default: the acceptance suite)")
    p.add_argument("--tol", help="default norm tolerance for uniqueness and stability checks")

    p = add("metastable", "metastability search on a finite sequence", _metastable)
    p.add_argument("--seq", help="sequence file: JSON list or one p/q per line")
    p.add_argument("--eps", help="stability threshold as p/q")
    p.add_argument("--f", help="bound: affine:a:b or table:path")

    p = add("report", "summarise a JSON report", _report)
    p.add_argument("--in", dest="input", help="report file (default: stdin)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.run(args)
    except (UsageError, FormulaError, ConfigError, MetastabilitySpecError,
            RationalFormatError, ValueError) as exc:
        print(f"prooflens: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
