"""Kohn-Laplace problems on the Heisenberg group H^n and the theorem suites.

Coordinates are (x, y, t) for n = 1 and (x_1..x_n, y_1..y_n, t) otherwise.
The Lagrangian is

    L = 1/2 sum_i (u_{x_i} + 2 y_i u_t)^2 + 1/2 sum_i (u_{y_i} - 2 x_i u_t)^2 - u^(p+1)/(p+1)

whose Euler-Lagrange equation is minus the semilinear equation
Delta_{H^n} u + u^p = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .coefficients import AffineExponent
from .expr import Context, Expr
from .jet import VectorField, euler_operator
from .noether import (
    CONDITIONAL,
    DIVERGENCE,
    VARIATIONAL,
    SymmetryVerdict,
    check_pde_symmetry,
    check_symmetry,
)
from .parser import ProblemSpec

Exponent = Union[str, int, Fraction]


def homogeneous_dimension(n: int) -> int:
    return 2 * n + 2


def critical_exponent(n: int) -> Fraction:
    """(n+2)/n, the value at which the dilation is variational; equals (Q+2)/(Q-2)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    q = homogeneous_dimension(n)
    p = Fraction(n + 2, n)
    if Fraction(q + 2, q - 2) != p:
        raise AssertionError("critical exponent formulas disagree")
    return p


def variables(n: int) -> tuple[str, ...]:
    if n == 1:
        return ("x", "y", "t")
    return tuple(f"x_{i}" for i in range(1, n + 1)) + tuple(f"y_{i}" for i in range(1, n + 1)) + ("t",)


def _pairs(n: int) -> list[tuple[str, str]]:
    if n == 1:
        return [("x", "y")]
    return [(f"x_{i}", f"y_{i}") for i in range(1, n + 1)]


@dataclass(frozen=True)
class HeisenbergProblem:
    n: int
    ctx: Context
    exponent: Exponent
    lagrangian: Expr
    equation: Expr
    catalog: tuple[VectorField, ...]

    @property
    def symbolic(self) -> bool:
        return isinstance(self.exponent, str)

    def generator(self, name: str) -> VectorField:
        for g in self.catalog:
            if g.name == name:
                return g
        raise KeyError(name)

    def problem_spec(self) -> ProblemSpec:
        ctx = self.ctx
        return ProblemSpec(
            ctx.independent, ctx.dependent, ctx.parameters, self.lagrangian, self.equation,
            tuple(sorted(self.catalog, key=lambda g: g.name)),
        )


def _power(ctx: Context, exponent: Exponent) -> tuple[AffineExponent, Expr]:
    """(p as an exponent, p as a coefficient expression)."""
    if isinstance(exponent, str):
        return AffineExponent.make(0, {exponent: 1}), ctx.var(exponent)
    q = Fraction(exponent)
    return AffineExponent(q), ctx.const(q)


def build(n: int, exponent: Exponent = "p", validate: bool = True) -> HeisenbergProblem:
    """Assemble the H^n problem for u^p with symbolic ``p`` (a name) or a fixed rational."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not isinstance(exponent, str):
        exponent = Fraction(exponent)
        if exponent in (1, -1):
            raise ValueError("p = 1 and p = -1 are excluded (the dilation and the Lagrangian are undefined)")
    names = variables(n)
    ctx = Context(names, "u", (exponent,) if isinstance(exponent, str) else ())
    p_exp, p = _power(ctx, exponent)
    u = ctx.var("u")
    ut = ctx.u("t")
    half = Fraction(1, 2)

    lag = ctx.zero()
    eq = ctx.zero()
    for xi, yi in _pairs(n):
        x, y = ctx.var(xi), ctx.var(yi)
        ux, uy = ctx.u(xi), ctx.u(yi)
        lag = lag + (ux + 2 * y * ut) ** 2 * half + (uy - 2 * x * ut) ** 2 * half
        eq = eq + ctx.u(xi, xi) + ctx.u(yi, yi) + 4 * (x**2 + y**2) * ctx.u("t", "t")
        eq = eq + 4 * y * ctx.u(xi, "t") - 4 * x * ctx.u(yi, "t")
    lag = lag - (u ** (p_exp + 1)) / (p + 1).as_coefficient()
    eq = eq + u**p_exp

    catalog = _catalog(ctx, n, p, exponent)
    prob = HeisenbergProblem(n, ctx, exponent, lag, eq, catalog)
    if validate:
        if eq != -euler_operator(lag):
            raise AssertionError("equation != -E(L)")
        if n > 1:
            for w in catalog:
                if not check_pde_symmetry(eq, w):
                    raise AssertionError(f"{w.name} is not admitted by the H^{n} equation")
    return prob


def _catalog(ctx: Context, n: int, p: Expr, exponent: Exponent) -> tuple[VectorField, ...]:
    t = ctx.var("t")
    u = ctx.var("u")
    dil_eta = 2 * u / (1 - p).as_coefficient()
    gens = [VectorField.make(ctx, "T", {"t": 1})]
    dil = {"t": 2 * t}
    if n == 1:
        x, y = ctx.var("x"), ctx.var("y")
        gens += [
            VectorField.make(ctx, "R", {"x": y, "y": -x}),
            VectorField.make(ctx, "Xt", {"x": 1, "t": -2 * y}),
            VectorField.make(ctx, "Yt", {"y": 1, "t": 2 * x}),
        ]
        dil.update({"x": x, "y": y})
    else:
        for xi, yi in _pairs(n):
            x, y = ctx.var(xi), ctx.var(yi)
            k = xi.split("_")[1]
            gens += [
                VectorField.make(ctx, f"Xt_{k}", {xi: 1, "t": -2 * y}),
                VectorField.make(ctx, f"Yt_{k}", {yi: 1, "t": 2 * x}),
            ]
            dil.update({xi: x, yi: y})
    gens.append(VectorField.make(ctx, "Z", dil, dil_eta))
    if n == 1 and not isinstance(exponent, str) and exponent == 3:
        gens += _critical_generators(ctx)
    return tuple(gens)


def _critical_generators(ctx: Context) -> list[VectorField]:
    x, y, t, u = (ctx.var(s) for s in "xytu")
    r2 = x**2 + y**2
    return [
        VectorField.make(ctx, "V1", {"x": x * t - x**2 * y - y**3, "y": y * t + x**3 + x * y**2, "t": t**2 - r2**2}, -t * u),
        VectorField.make(ctx, "V2", {"x": t - 4 * x * y, "y": 3 * x**2 - y**2, "t": -(2 * y * t + 2 * x**3 + 2 * x * y**2)}, 2 * y * u),
        VectorField.make(ctx, "V3", {"x": x**2 - 3 * y**2, "y": t + 4 * x * y, "t": 2 * x * t - 2 * x**2 * y - 2 * y**3}, -2 * x * u),
    ]


# -- golden data for n = 1 ----------------------------------------------------

def dilation_residual_n1(ctx: Context) -> Expr:
    """Z-residual for symbolic p in closed form.

    The quadratic part is twice that of L, so the cross terms carry 4y and -4x.
    """
    return ctx.parse(
        "(3-p)/(1-p)*(u_x^2+u_y^2+4*(x^2+y^2)*u_t^2+4*y*u_x*u_t-4*x*u_y*u_t)"
        " + 2*(3-p)/(p^2-1)*u^(p+1)"
    )


def critical_residuals(ctx: Context) -> dict[str, Expr]:
    return {
        "V1": ctx.parse("2*x*u*u_y - 2*y*u*u_x - 4*(x^2+y^2)*u*u_t"),
        "V2": ctx.parse("2*u*u_y - 4*x*u*u_t"),
        "V3": ctx.parse("-2*u*u_x - 4*y*u*u_t"),
    }


def critical_potentials(ctx: Context) -> dict[str, tuple[Expr, ...]]:
    def vec(*texts):
        return tuple(ctx.parse(s) for s in texts)

    return {
        "V1": vec("-y*u^2", "x*u^2", "-2*(x^2+y^2)*u^2"),
        "V2": vec("0", "u^2", "-2*x*u^2"),
        "V3": vec("-u^2", "0", "-2*y*u^2"),
    }


# -- suites -------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    title: str
    problem: HeisenbergProblem
    verdicts: list[SymmetryVerdict] = field(default_factory=list)
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(CheckResult(name, bool(ok), detail))
        return ok

    def verdict(self, name: str) -> SymmetryVerdict:
        for v in self.verdicts:
            if v.generator == name:
                return v
        raise KeyError(name)


def _run(report: SuiteReport, name: str, fn):
    try:
        fn()
    except Exception as exc:  # reported, never swallowed silently
        report.check(name, False, f"{type(exc).__name__}: {exc}")


def theorem1_suite(n: int = 1) -> SuiteReport:
    """Translations/rotations/right multiplications variational for all p; Z only at p=(n+2)/n."""
    prob = build(n, "p")
    rep = SuiteReport(f"theorem1 (H^{n}, symbolic p)", prob)
    rep.check("equation == -E(L)", prob.equation == -euler_operator(prob.lagrangian))
    p_crit = critical_exponent(n)
    for w in sorted(prob.catalog, key=lambda g: g.name):
        def one(w=w):
            v = check_symmetry(prob.lagrangian, w)
            rep.verdicts.append(v)
            if w.name != "Z":
                rep.check(f"{w.name} variational for symbolic p", v.status == VARIATIONAL, v.status)
                return
            c = v.conditions
            ok = (
                v.status == CONDITIONAL
                and v.conditions_on == "residual"
                and c.roots == (p_crit,)
                and not c.unsolved
                and c.excluded == (Fraction(-1), Fraction(1))
            )
            rep.check(f"Z conditional exactly at p = {p_crit}", ok, c.describe() if c else v.status)
            if n == 1:
                rep.check("Z residual matches closed form", v.residual == dilation_residual_n1(prob.ctx), str(v.residual))

        _run(rep, w.name, one)
    rep.check("critical exponent (Q+2)/(Q-2) == (n+2)/n", critical_exponent(n) == Fraction(n + 2, n))
    return rep


def theorem2_suite() -> SuiteReport:
    """Every point symmetry of the critical H^1 equation is a divergence symmetry."""
    prob = build(1, 3)
    rep = SuiteReport("theorem2 (H^1, p = 3)", prob)
    ctx = prob.ctx
    golden_res = critical_residuals(ctx)
    golden_pot = critical_potentials(ctx)
    rep.check("equation == -E(L)", prob.equation == -euler_operator(prob.lagrangian))
    for w in sorted(prob.catalog, key=lambda g: g.name):
        def one(w=w):
            v = check_symmetry(prob.lagrangian, w)
            rep.verdicts.append(v)
            if w.name in golden_res:
                rep.check(f"{w.name} divergence symmetry", v.status == DIVERGENCE, v.status)
                rep.check(f"{w.name} residual", v.residual == golden_res[w.name], str(v.residual))
                pots = v.certificate.potentials if v.certificate else ()
                rep.check(
                    f"{w.name} potentials", tuple(pots) == golden_pot[w.name],
                    "(" + ", ".join(str(e) for e in pots) + ")",
                )
            else:
                rep.check(f"{w.name} variational", v.status == VARIATIONAL, v.status)
            rep.check(f"{w.name} admitted by the equation", check_pde_symmetry(prob.equation, w))

        _run(rep, w.name, one)
    return rep


def catalog_suite(n: int, exponent: Exponent) -> SuiteReport:
    """Plain symmetry verdicts for the catalog at a given exponent (no expectations)."""
    prob = build(n, exponent)
    rep = SuiteReport(f"catalog (H^{n}, p = {exponent})", prob)
    for w in sorted(prob.catalog, key=lambda g: g.name):
        def one(w=w):
            v = check_symmetry(prob.lagrangian, w)
            rep.verdicts.append(v)
            rep.check(f"{w.name} {v.status}", v.passed, v.status)

        _run(rep, w.name, one)
    return rep
