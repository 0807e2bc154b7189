"""Machine- and human-readable reports for symmetry checks."""

from __future__ import annotations

import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Iterable

from .noether import CONDITIONAL, DIVERGENCE, VARIATIONAL, SymmetryVerdict
from .parser import print_expr

_COLORS = {VARIATIONAL: "32", DIVERGENCE: "32", CONDITIONAL: "33", "neither": "31", "PASS": "32", "FAIL": "31"}


@dataclass
class GeneratorReport:
    name: str
    status: str
    residual: str
    conditions: dict | None = None
    conditions_on: str | None = None
    potentials: list[str] | None = None
    excluded: list[str] | None = None


@dataclass
class CheckLine:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    title: str
    problem: dict
    generators: list[GeneratorReport] = field(default_factory=list)
    checks: list[CheckLine] = field(default_factory=list)
    overall: str = "pass"

    @property
    def passed(self) -> bool:
        return self.overall == "pass"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "Report":
        return cls(
            title=doc["title"],
            problem=dict(doc["problem"]),
            generators=[GeneratorReport(**g) for g in doc.get("generators", [])],
            checks=[CheckLine(**c) for c in doc.get("checks", [])],
            overall=doc["overall"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self, color: bool = False) -> str:
        def paint(word, key=None):
            code = _COLORS.get(key or word)
            return f"\x1b[{code}m{word}\x1b[0m" if color and code else word

        lines = [self.title]
        prob = self.problem
        params = ", ".join(prob.get("parameters") or []) or "none"
        lines.append(f"  variables: {', '.join(prob['independent'])}; dependent: {prob['dependent']}; parameters: {params}")
        if prob.get("lagrangian"):
            lines.append(f"  L = {prob['lagrangian']}")
        if prob.get("equation"):
            lines.append(f"  equation: {prob['equation']} = 0")
        width = max((len(g.name) for g in self.generators), default=0)
        for g in self.generators:
            lines.append(f"  {g.name.ljust(width)}  {paint(g.status.ljust(11), g.status)}  residual: {g.residual}")
            pad = " " * (width + 17)
            if g.potentials is not None:
                lines.append(f"{pad}potentials: ({', '.join(g.potentials)})")
            if g.conditions is not None:
                lines.append(f"{pad}conditions ({g.conditions_on}): {_describe(g.conditions)}")
        if self.checks:
            lines.append("  checks:")
            for c in self.checks:
                word = "PASS" if c.passed else "FAIL"
                tail = f"  [{c.detail}]" if c.detail and not c.passed else ""
                lines.append(f"    {paint(word)}  {c.name}{tail}")
        lines.append(f"overall: {paint('PASS' if self.passed else 'FAIL')}")
        return "\n".join(lines)


def _describe(cond: dict) -> str:
    if cond.get("always_zero"):
        return "identically zero"
    if not cond.get("solved", True):
        return ", ".join(f"{v} = 0" for v in cond["vanishing"])
    parts = [f"{cond['parameter']} = {r}" for r in cond["roots"]] + [f"{v} = 0" for v in cond["unsolved"]]
    text = " or ".join(parts) if parts else "none"
    if cond.get("excluded"):
        text += f"; excluded {cond['parameter']} in {{{', '.join(cond['excluded'])}}}"
    return text


def use_color(stream=None) -> bool:
    mode = os.environ.get("NOETHERA_COLOR", "auto").lower()
    if mode == "always":
        return True
    if mode == "never":
        return False
    stream = stream or sys.stdout
    return hasattr(stream, "isatty") and stream.isatty()


def problem_summary(ctx, lagrangian=None, equation=None, name: str = "") -> dict:
    return {
        "name": name,
        "independent": list(ctx.independent),
        "dependent": ctx.dependent,
        "parameters": list(ctx.parameters),
        "lagrangian": print_expr(lagrangian) if lagrangian is not None else None,
        "equation": print_expr(equation) if equation is not None else None,
    }


def generator_report(v: SymmetryVerdict) -> GeneratorReport:
    cert = v.certificate
    return GeneratorReport(
        name=v.generator,
        status=v.status,
        residual=print_expr(v.residual),
        conditions=v.conditions.to_dict() if v.conditions is not None and v.status == CONDITIONAL else None,
        conditions_on=v.conditions_on if v.status == CONDITIONAL else None,
        potentials=[print_expr(p) for p in cert.potentials] if cert is not None else None,
        excluded=[str(q) for q in cert.excluded] if cert is not None and cert.excluded else None,
    )


def verdict_report(title: str, summary: dict, verdicts: Iterable[SymmetryVerdict], allow_conditional=False) -> Report:
    verdicts = sorted(verdicts, key=lambda v: v.generator)
    ok = all(v.passed or (allow_conditional and v.status == CONDITIONAL) for v in verdicts)
    return Report(title, summary, [generator_report(v) for v in verdicts], [], "pass" if ok else "fail")


def suite_report(suite) -> Report:
    prob = suite.problem
    summary = problem_summary(prob.ctx, prob.lagrangian, prob.equation, f"H^{prob.n}")
    gens = [generator_report(v) for v in sorted(suite.verdicts, key=lambda v: v.generator)]
    checks = [CheckLine(c.name, c.passed, c.detail) for c in suite.checks]
    return Report(suite.title, summary, gens, checks, "pass" if suite.passed else "fail")
