"""Command-line front end.

Exit codes: 0 all checks pass, 1 a mathematical check failed (or an operation
rejected its input), 2 input error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import NoetheraError, ParseError, ProblemSchemaError
from .heisenberg import catalog_suite, theorem1_suite, theorem2_suite
from .expr import JetVar
from .jet import divergence, euler_operator, prolong
from .noether import check_symmetry, homotopy_potentials, pde_symmetry_residual
from .parser import ProblemSpec, load_problem, parse_expr, print_expr
from .report import problem_summary, suite_report, use_color, verdict_report

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _InputError(Exception):
    pass


class _Once(argparse.Action):
    """Store a value, refusing repeats (``--n 1 --n 2`` is ambiguous)."""

    def __call__(self, parser, namespace, values, option_string=None):
        if getattr(namespace, f"_seen_{self.dest}", False):
            parser.error(f"{option_string} given more than once")
        setattr(namespace, f"_seen_{self.dest}", True)
        setattr(namespace, self.dest, values)


def shipped_problem(name: str) -> Path:
    return Path(str(resources.files("noethera") / "problems" / name))


def _resolve_path(arg: str) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    for cand in (arg, f"{arg}.json"):
        s = shipped_problem(cand)
        if s.exists():
            return s
    raise _InputError(f"no such problem file: {arg}")


def _load(arg: str) -> ProblemSpec:
    try:
        return load_problem(_resolve_path(arg))
    except ProblemSchemaError as exc:
        raise _InputError(f"{arg}: {exc}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise _InputError(f"{arg}: {exc}") from None


def _emit(reports, fmt: str, out):
    if fmt == "json":
        docs = [r.to_dict() for r in reports]
        out.write(json.dumps(docs[0] if len(docs) == 1 else docs, indent=2, ensure_ascii=False) + "\n")
    else:
        color = use_color(out)
        out.write("\n\n".join(r.to_text(color) for r in reports) + "\n")


# -- subcommands ------------------------------------------------------------

def cmd_check(args, out) -> int:
    spec = _load(args.problem)
    if spec.lagrangian is None:
        raise _InputError(f"{args.problem}: the problem has no lagrangian")
    if spec.lagrangian.jet_order() > 1:
        raise _InputError(f"{args.problem}: the lagrangian must be first order")
    verdicts = [check_symmetry(spec.lagrangian, w) for w in spec.generators]
    summary = problem_summary(spec.ctx, spec.lagrangian, spec.equation, spec.name or Path(args.problem).stem)
    rep = verdict_report(f"check {summary['name']}", summary, verdicts, args.allow_conditional)
    _emit([rep], args.format, out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _exponent(text: str):
    if text == "symbolic":
        return "p"
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _InputError(f"--p must be 'symbolic' or a rational number, got {text!r}") from None


def cmd_heisenberg(args, out, parser) -> int:
    n = args.n
    if n < 1:
        parser.error("--n must be a positive integer")
    p = _exponent(args.p)
    suite = args.suite or ("both" if n == 1 else "theorem1")
    if suite in ("theorem2", "both") and n != 1:
        parser.error(
            "theorem2 is only defined for n = 1: the complete group classification "
            "is available only for n = 1"
        )
    if suite in ("theorem1", "both") and p != "p":
        parser.error("theorem1 is stated for symbolic p; use --suite catalog for a fixed exponent")
    if suite == "theorem2" and p not in ("p", 3):
        parser.error("theorem2 concerns the critical exponent p = 3")
    if suite == "catalog" and p in (1, -1):
        parser.error("p = 1 and p = -1 are excluded")
    reports = []
    if suite in ("theorem1", "both"):
        reports.append(suite_report(theorem1_suite(n)))
    if suite in ("theorem2", "both"):
        reports.append(suite_report(theorem2_suite()))
    if suite == "catalog":
        s = catalog_suite(n, p)
        if args.allow_conditional:
            for c in s.checks:
                if c.detail == "conditional":
                    c.passed = True
        reports.append(suite_report(s))
    _emit(reports, args.format, out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _problem_and_ctx(args):
    src = args.problem
    if src is None:
        raise _InputError("--problem is required")
    spec = _load(src)
    return spec, spec.ctx


def _parse(text, ctx):
    try:
        return parse_expr(text, ctx)
    except ParseError as exc:
        raise _InputError(f"cannot parse {text!r}: {exc}") from None


def _generator(spec, name):
    try:
        return spec.generator(name)
    except KeyError as exc:
        raise _InputError(str(exc.args[0])) from None


def _solved_variable(text, ctx) -> JetVar:
    e = _parse(text, ctx)
    jets = e.jet_variables()
    if len(jets) != 1 or e != ctx.var(next(iter(jets))):
        raise _InputError(f"--solved must name a single jet variable, got {text!r}")
    return next(iter(jets))


def cmd_tools(args, out) -> int:
    spec, ctx = _problem_and_ctx(args)
    result: dict
    tool = args.tool
    if tool == "prolong":
        wp = prolong(_generator(spec, args.gen), args.order)
        coeffs = {ctx.jet_name(j): print_expr(e) for j, e in wp.eta_j.items() if j.order}
        xi = {v: print_expr(e) for v, e in zip(ctx.independent, wp.base.xi)}
        result = {"generator": args.gen, "order": args.order, "xi": xi, "eta": print_expr(wp.base.eta), "eta_J": coeffs}
        text = [f"xi[{v}] = {e}" for v, e in xi.items()] + [f"eta = {result['eta']}"]
        text += [f"eta[{j}] = {e}" for j, e in coeffs.items()]
    elif tool == "euler-lagrange":
        if args.expr:
            a = _parse(args.expr, ctx)
        elif spec.lagrangian is not None:
            a = spec.lagrangian
        else:
            raise _InputError("no --expr given and the problem has no lagrangian")
        e = euler_operator(a)
        result = {"input": print_expr(a), "euler_lagrange": print_expr(e), "equation": print_expr(-e)}
        text = [result["euler_lagrange"]]
    elif tool == "divergence":
        phi = [_parse(t, ctx) for t in args.expr or []]
        if len(phi) != len(ctx.independent):
            raise _InputError(f"divergence needs one --expr per independent variable ({len(ctx.independent)})")
        result = {"divergence": print_expr(divergence(phi, ctx))}
        text = [result["divergence"]]
    elif tool == "homotopy":
        if not args.expr:
            raise _InputError("--expr is required")
        cert = homotopy_potentials(_parse(args.expr, ctx))
        pots = [print_expr(p) for p in cert.potentials]
        result = {"residual": print_expr(cert.residual), "potentials": pots, "excluded": [str(q) for q in cert.excluded]}
        text = ["(" + ", ".join(pots) + ")"]
    elif tool == "pde-symmetry":
        eq = _parse(args.expr, ctx) if args.expr else spec.equation
        if eq is None:
            raise _InputError("no --expr given and the problem has no equation")
        w = _generator(spec, args.gen)
        solved = _solved_variable(args.solved, ctx) if args.solved else None
        res = pde_symmetry_residual(eq, w, solved)
        ok = res.is_zero()
        result = {"generator": w.name, "admitted": ok, "residual": print_expr(res)}
        text = [f"{w.name}: {'admitted' if ok else 'not admitted'}", f"on-shell residual: {result['residual']}"]
        _tool_out(args, result, text, out)
        return EXIT_OK if ok else EXIT_FAIL
    else:  # pragma: no cover - argparse restricts choices
        raise _InputError(f"unknown tool {tool}")
    _tool_out(args, result, text, out)
    return EXIT_OK


def _tool_out(args, result, text, out):
    if args.format == "json":
        out.write(json.dumps(result, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write("\n".join(text) + "\n")


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="noethera", description="Lie symmetry analysis of variational PDEs.")
    sub = ap.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    c = sub.add_parser("check", help="classify every generator of a problem file")
    c.add_argument("problem", help="problem file (or the name of a shipped problem)")
    c.add_argument("--allow-conditional", action="store_true", help="treat conditional verdicts as passing")
    fmt(c)

    h = sub.add_parser("heisenberg", help="run the built-in Heisenberg group suites")
    h.add_argument("--n", type=int, default=1, action=_Once)
    h.add_argument("--p", default="symbolic", action=_Once, help="'symbolic' or a rational exponent")
    h.add_argument("--suite", choices=("theorem1", "theorem2", "both", "catalog"), action=_Once)
    h.add_argument("--allow-conditional", action="store_true")
    fmt(h)

    t = sub.add_parser("tools", help="one-off jet-calculus utilities")
    tsub = t.add_subparsers(dest="tool", required=True)
    for name in ("prolong", "euler-lagrange", "divergence", "homotopy", "pde-symmetry"):
        p = tsub.add_parser(name)
        p.add_argument("--problem", "--file", dest="problem", help="problem file supplying the declarations")
        append = name == "divergence"
        p.add_argument("--expr", action="append" if append else "store", help="expression text")
        if name in ("prolong", "pde-symmetry"):
            p.add_argument("--gen", required=True, help="generator name from the problem file")
        if name == "prolong":
            p.add_argument("--order", type=int, default=1)
        if name == "pde-symmetry":
            p.add_argument("--solved", help="second-order jet variable to eliminate (default: automatic)")
        fmt(p)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        # usage errors from argparse go to ``err`` and exit with status 2
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
            if args.command == "check":
                return cmd_check(args, out)
            if args.command == "heisenberg":
                return cmd_heisenberg(args, out, parser)
            return cmd_tools(args, out)
    except _InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except NoetheraError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
