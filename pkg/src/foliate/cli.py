"""Command-line entry point.

Exit codes: 0 success, 1 computational failure (an operation error or a
suite mismatch), 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .parsing import Directive, ScenarioError, parse_scenario
from .runner import Executor, render_json, render_suite, render_text, run_suite

OPERATIONS = (
    "check-basic", "solve-basic", "curvature", "reduce", "metric",
    "equiv-d", "moment", "chern", "equiv-chern", "chern-weil",
    "involutive", "basic-form", "bott", "closure-rank", "cohomology", "transverse",
    "check-connection", "transgression", "equiv-curvature", "horizontal",
)


def _common(p):
    p.add_argument("--cutoff", type=int, help="Fourier cutoff overriding the scenario header")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="foliate", description="Exact foliated and equivariant calculus on tori.")
    ap.add_argument("--suite", metavar="NAME", help="run a bundled scenario suite and exit")
    _common(ap)
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("run", help="run every directive of a scenario file")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("suite", help="run bundled scenarios against their expected outputs")
    p.add_argument("name", nargs="?", default="all")
    _common(p)

    for op in OPERATIONS:
        p = sub.add_parser(op, help=f"run '{op}' on objects declared in a scenario file")
        p.add_argument("file")
        p.add_argument("args", nargs="*", help="object names and key=value options")
        _common(p)

    k = sub.add_parser("kronecker", help="Kronecker holonomy groupoid")
    ksub = k.add_subparsers(dest="kcommand", required=True)
    for name in ("orbit", "closure"):
        p = ksub.add_parser(name)
        p.add_argument("--slope", required=True, help="'irr:NAME' or a rational 'p/q'")
        if name == "orbit":
            p.add_argument("--start", default="0", help="start angle as a rational multiple of pi")
            p.add_argument("--steps", type=int, default=0)
        _common(p)
    p = ksub.add_parser("average")
    p.add_argument("file")
    p.add_argument("args", nargs=2, metavar=("CONNECTION", "SLOPE"))
    _common(p)
    return ap


def _emit(records, fmt, name, out):
    out.write(render_json(records, name) if fmt == "json" else render_text(records))
    return 1 if any(r.status == "error" for r in records) else 0


def _single(file, op, args, ns, out):
    text = Path(file).read_text()
    s = parse_scenario(text, file)
    pos = tuple(a for a in args if "=" not in a)
    opts = dict(a.split("=", 1) for a in args if "=" in a)
    d = Directive(op, pos, opts, 0)
    return _emit([Executor(s, file, ns.cutoff).run(d)], ns.format, Path(file).stem, out)


def _suite(name, fmt, out):
    try:
        entries = run_suite(name)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    if fmt == "json":
        import json

        doc = {"suite": name, "scenarios": [{"name": e.name, "passed": e.passed, "detail": e.detail} for e in entries]}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(render_suite(entries))
    return 0 if entries and all(e.passed for e in entries) else 1


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ns = build_parser().parse_args(argv)
    try:
        if ns.suite:
            return _suite(ns.suite, ns.format, out)
        if ns.command is None:
            build_parser().print_help(out)
            return 2
        if ns.command == "suite":
            return _suite(ns.name, ns.format, out)
        if ns.command == "run":
            text = Path(ns.file).read_text()
            s = parse_scenario(text, ns.file)
            records = Executor(s, ns.file, ns.cutoff).run_all()
            return _emit(records, ns.format, Path(ns.file).stem, out)
        if ns.command == "kronecker":
            if ns.kcommand == "average":
                return _single(ns.file, "kronecker-average", ns.args, ns, out)
            text = f"coords x y\n"
            if ns.slope.startswith("irr:"):
                text += f"params {ns.slope[4:]}\n"
            text += f"slope s = {ns.slope}\n"
            s = parse_scenario(text, "<command line>")
            opts = {"start": ns.start, "steps": str(ns.steps)} if ns.kcommand == "orbit" else {}
            d = Directive("kronecker-" + ns.kcommand, ("s",), opts, 0)
            return _emit([Executor(s, "<command line>").run(d)], ns.format, None, out)
        return _single(ns.file, ns.command, ns.args, ns, out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"internal failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
