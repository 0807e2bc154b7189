"""Expression grammar, pretty-printer and JSON problem files.

Grammar (``^`` binds tightest and is right-associative; unary minus binds
looser than ``^``, so ``-u^2`` is ``-(u^2)``)::

    sum     := product (("+" | "-") product)*
    product := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" exponent)?
    exponent:= ("-" | "+") exponent | power
    atom    := INT | NAME | "d" "(" NAME ("," NAME)* ")" | "(" sum ")"

Division is only by parameter-only expressions.  ``u_xy`` shorthand is
recognised when every independent variable has a one-letter name.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Union

from .coefficients import AffineExponent, ParamRational, coefficient_factor
from .errors import ParseError, ProblemSchemaError, UndeclaredNameError
from .expr import Context, Expr, JetVar, pow_expr
from .jet import VectorField

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\*\*|[-+*/^(),]))")


def _tokenize(src: str):
    pos = 0
    out = []
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            if src[pos:].strip() == "":
                break
            bad = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ParseError(f"unexpected character {src[bad]!r}", bad, src)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, src: str, ctx: Context):
        self.src = src
        self.ctx = ctx
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, op):
        kind, val, _ = self.peek()
        if kind == "op" and val == op:
            self.i += 1
            return True
        return False

    def expect(self, op):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val or 'end of input'!r}", pos, self.src)
        self.i += 1

    def parse(self) -> Expr:
        e = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos, self.src)
        return e

    def sum(self) -> Expr:
        left = self.product()
        while True:
            if self.accept("+"):
                left = left + self.product()
            elif self.accept("-"):
                left = left - self.product()
            else:
                return left

    def product(self) -> Expr:
        left = self.unary()
        while True:
            if self.accept("*"):
                left = left * self.unary()
            elif self.peek()[:2] == ("op", "/"):
                pos = self.take()[2]
                right = self.unary()
                if not right.is_constant():
                    raise ParseError("division by a variable-dependent expression", pos, self.src)
                c = right.as_coefficient()
                if not c:
                    raise ParseError("division by zero", pos, self.src)
                left = left.scale(1 / c)
            else:
                return left

    def unary(self) -> Expr:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            pos = self.take()[2]
            exp = self.exponent()
            if not exp.is_constant():
                raise ParseError("exponent depends on variables", pos, self.src)
            aff = exp.as_coefficient().to_affine()
            if aff is None:
                raise ParseError(f"exponent {exp} is not affine in the parameters", pos, self.src)
            try:
                return pow_expr(base, aff)
            except Exception as exc:  # UnsupportedPowerError, ZeroDivisionError
                raise ParseError(str(exc), pos, self.src) from None
        return base

    def exponent(self) -> Expr:
        if self.accept("-"):
            return -self.exponent()
        if self.accept("+"):
            return self.exponent()
        return self.power()

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        ctx = self.ctx
        if kind == "num":
            return ctx.const(int(val))
        if kind == "name":
            if val == "d" and self.peek()[:2] == ("op", "("):
                return self.derivative(pos)
            try:
                return ctx.var(val)
            except KeyError:
                hint = ""
                if val.startswith(ctx.dependent + "_") and not ctx.shorthand:
                    hint = "variable names are longer than one letter; write d(u, x_1, ...)"
                raise UndeclaredNameError(val, pos, self.src, hint) from None
        if kind == "op" and val == "(":
            e = self.sum()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.src)

    def derivative(self, pos) -> Expr:
        ctx = self.ctx
        self.expect("(")
        kind, name, npos = self.take()
        if kind != "name":
            raise ParseError("d(...) expects the dependent variable first", npos, self.src)
        try:
            base = ctx.resolve(name)
        except KeyError:
            raise UndeclaredNameError(name, npos, self.src) from None
        if not isinstance(base, JetVar):
            raise ParseError(f"{name!r} is not the dependent variable", npos, self.src)
        index = list(base.index)
        while self.accept(","):
            kind, name, npos = self.take()
            if kind != "name":
                raise ParseError("expected an independent variable", npos, self.src)
            if name not in ctx.position:
                raise UndeclaredNameError(name, npos, self.src, "not an independent variable")
            index.append(name)
        self.expect(")")
        return ctx.var(ctx.jet(*index))


def parse_expr(src: str, ctx: Context) -> Expr:
    """Parse ``src`` into a canonical expression over ``ctx``."""
    return _Parser(src, ctx).parse()


# -- printing -----------------------------------------------------------------

def _exp_text(e: AffineExponent) -> str:
    if e.is_nonnegative_integer:
        return str(e.constant.numerator)
    if e.constant == 0 and len(e.slopes) == 1 and e.slopes[0][1] == 1:
        return e.slopes[0][0]
    return f"({e})"


def _factor_text(ctx: Context, v, e: AffineExponent) -> str:
    name = ctx.jet_name(v) if isinstance(v, JetVar) else v.name
    if e.constant == 1 and not e.slopes:
        return name
    return f"{name}^{_exp_text(e)}"


def _term_text(ctx: Context, c: ParamRational, factors: list[str]) -> tuple[bool, str]:
    """(negative, body) for ``c * factors``."""
    neg = c.is_negative()
    mag = -c if neg else c
    parts = list(factors)
    if mag != 1 or not parts:
        parts.insert(0, coefficient_factor(mag))
    return neg, "*".join(parts)


def _rational_content(qs) -> Fraction:
    num, den = 0, 1
    for q in qs:
        num = math.gcd(num, q.numerator)
        den = den * q.denominator // math.gcd(den, q.denominator)
    return Fraction(num, den)


def _content(coefs: list[ParamRational]) -> ParamRational:
    """Common factor of a group's coefficients.

    Constant coefficients give their positive rational content; parametric
    ones are factored only when all are rational multiples of each other.
    """
    one = ParamRational(1)
    if all(c.is_constant for c in coefs):
        return ParamRational(_rational_content(c.constant for c in coefs))
    base = -coefs[0] if coefs[0].is_negative() else coefs[0]
    ratios = [c / base for c in coefs]
    if not all(r.is_constant for r in ratios):
        return one
    return base * ParamRational(_rational_content(r.constant for r in ratios))


def print_expr(a: Expr) -> str:
    """Deterministic text; ``parse_expr(print_expr(a), a.ctx) == a``.

    Terms sharing a product of jet variables are grouped, so the V1 residual
    prints as ``-2*y*u*u_x + 2*x*u*u_y - 4*(x^2+y^2)*u*u_t``.
    """
    ctx = a.ctx
    if a.is_zero():
        return "0"
    groups: dict = {}
    for key, c in a.items():
        jet = tuple(sorted(((v, e) for v, e in key if isinstance(v, JetVar)), key=lambda it: ctx.sort_key(it[0])))
        rest = tuple(sorted(((v, e) for v, e in key if not isinstance(v, JetVar)), key=lambda it: ctx.sort_key(it[0])))
        groups.setdefault(jet, []).append((rest, c))

    def rank(v):
        # first-order jets lead, u itself comes last
        return (v.order == 0, v.order, ctx.sort_key(v))

    def group_key(jet):
        if not jet:
            return (1, 0, ())
        deg = sum((e.constant for _, e in jet), Fraction(0))
        return (0, -deg, tuple(sorted((rank(v), -e.constant, str(e)) for v, e in jet)))

    def space_key(item):
        rest, _ = item
        deg = sum((e.constant for _, e in rest), Fraction(0))
        return (-deg, tuple((ctx.sort_key(v), -e.constant, str(e)) for v, e in rest))

    pieces: list[tuple[bool, str]] = []
    for jet in sorted(groups, key=group_key):
        jet_factors = [_factor_text(ctx, v, e) for v, e in jet]
        members = sorted(groups[jet], key=space_key)
        rendered = [_term_text(ctx, c, [_factor_text(ctx, v, e) for v, e in rest]) for rest, c in members]
        if len(members) == 1 or not jet:
            for (rest, c) in members:
                pieces.append(_term_text(ctx, c, [_factor_text(ctx, v, e) for v, e in rest] + jet_factors))
            continue
        flip = all(neg for neg, _ in rendered)
        content = _content([c for _, c in members])
        if content != 1:
            members = [(rest, c / content) for rest, c in members]
            rendered = [_term_text(ctx, c, [_factor_text(ctx, v, e) for v, e in rest]) for rest, c in members]
        inner = []
        for k, (neg, body) in enumerate(rendered):
            neg = neg != flip
            if k == 0:
                inner.append(("-" if neg else "") + body)
            else:
                inner.append(("-" if neg else "+") + body)
        lead = [coefficient_factor(content)] if content != 1 else []
        pieces.append((flip, "*".join(lead + [f"({''.join(inner)})"] + jet_factors)))

    out = []
    for k, (neg, body) in enumerate(pieces):
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# -- problem files -------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    independent: tuple[str, ...]
    dependent: str
    parameters: tuple[str, ...]
    lagrangian: Expr | None
    equation: Expr | None
    generators: tuple[VectorField, ...]
    name: str = ""

    @property
    def ctx(self) -> Context:
        return Context(self.independent, self.dependent, self.parameters)

    def generator(self, name: str) -> VectorField:
        for g in self.generators:
            if g.name == name:
                return g
        known = ", ".join(g.name for g in self.generators)
        raise KeyError(f"no generator named {name!r} (known: {known})")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {}
        if self.name:
            out["name"] = self.name
        out["independent"] = list(self.independent)
        out["dependent"] = self.dependent
        out["parameters"] = list(self.parameters)
        if self.lagrangian is not None:
            out["lagrangian"] = print_expr(self.lagrangian)
        if self.equation is not None:
            out["equation"] = print_expr(self.equation)
        out["generators"] = [
            {
                "name": g.name,
                "xi": {v: print_expr(x) for v, x in zip(self.independent, g.xi) if x},
                "eta": print_expr(g.eta),
            }
            for g in self.generators
        ]
        return out


_TOP_KEYS = {"name", "description", "independent", "dependent", "parameters", "lagrangian", "equation", "generators"}
_GEN_KEYS = {"name", "description", "xi", "eta"}


def _names(doc, key, required=True):
    if key not in doc:
        if required:
            raise ProblemSchemaError(key, "missing required field")
        return []
    val = doc[key]
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise ProblemSchemaError(key, "expected a list of names")
    return val


def _expr_field(text, path, ctx) -> Expr:
    if isinstance(text, (int,)) and not isinstance(text, bool):
        text = str(text)
    if not isinstance(text, str):
        raise ProblemSchemaError(path, "expected expression text")
    try:
        return parse_expr(text, ctx)
    except UndeclaredNameError as exc:
        raise ProblemSchemaError(path, f"undeclared identifier {exc.name!r}") from None
    except ParseError as exc:
        raise ProblemSchemaError(path, str(exc)) from None


def problem_from_dict(doc: Mapping) -> ProblemSpec:
    if not isinstance(doc, Mapping):
        raise ProblemSchemaError("", "problem document must be a JSON object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise ProblemSchemaError(unknown[0], "unknown field")
    independent = _names(doc, "independent")
    if not independent:
        raise ProblemSchemaError("independent", "at least one independent variable is required")
    dependent = doc.get("dependent")
    if not isinstance(dependent, str):
        raise ProblemSchemaError("dependent", "missing or not a name")
    parameters = _names(doc, "parameters", required=False)
    try:
        ctx = Context(tuple(independent), dependent, tuple(parameters))
    except ValueError as exc:
        raise ProblemSchemaError("independent/dependent/parameters", str(exc)) from None

    lag = _expr_field(doc["lagrangian"], "lagrangian", ctx) if doc.get("lagrangian") is not None else None
    eq = _expr_field(doc["equation"], "equation", ctx) if doc.get("equation") is not None else None
    if lag is None and eq is None:
        raise ProblemSchemaError("lagrangian", "at least one of 'lagrangian' and 'equation' is required")

    gens_doc = doc.get("generators", [])
    if not isinstance(gens_doc, list):
        raise ProblemSchemaError("generators", "expected a list")
    gens = []
    seen = set()
    for i, g in enumerate(gens_doc):
        path = f"generators[{i}]"
        if not isinstance(g, Mapping):
            raise ProblemSchemaError(path, "expected an object")
        bad = sorted(set(g) - _GEN_KEYS)
        if bad:
            raise ProblemSchemaError(f"{path}.{bad[0]}", "unknown field")
        name = g.get("name")
        if not isinstance(name, str) or not name:
            raise ProblemSchemaError(f"{path}.name", "missing or empty")
        if name in seen:
            raise ProblemSchemaError(f"{path}.name", f"duplicate generator name {name!r}")
        seen.add(name)
        xi_doc = g.get("xi", {})
        if not isinstance(xi_doc, Mapping):
            raise ProblemSchemaError(f"{path}.xi", "expected an object mapping variables to expressions")
        for v in xi_doc:
            if v not in ctx.position:
                raise ProblemSchemaError(f"{path}.xi.{v}", f"undeclared independent variable {v!r}")
        xi = {v: _expr_field(t, f"{path}.xi.{v}", ctx) for v, t in xi_doc.items()}
        if "eta" not in g:
            raise ProblemSchemaError(f"{path}.eta", "missing required field")
        eta = _expr_field(g["eta"], f"{path}.eta", ctx)
        try:
            gens.append(VectorField.make(ctx, name, xi, eta))
        except ValueError as exc:
            raise ProblemSchemaError(path, str(exc)) from None
    gens.sort(key=lambda w: w.name)
    return ProblemSpec(
        tuple(independent), dependent, tuple(parameters), lag, eq, tuple(gens), str(doc.get("name", ""))
    )


def load_problem(source: Union[str, Path, Mapping]) -> ProblemSpec:
    """Load a problem from a path, JSON text, or an already-decoded mapping."""
    if isinstance(source, Mapping):
        return problem_from_dict(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemSchemaError("", f"invalid JSON: {exc}") from None
    return problem_from_dict(doc)


def dump_problem(spec: ProblemSpec) -> str:
    return json.dumps(spec.to_dict(), indent=2, ensure_ascii=False) + "\n"

