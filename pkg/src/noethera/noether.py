"""Variational and divergence symmetry checks, homotopy potentials, PDE admittance."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coefficients import AffineExponent, ParamRational
from .conditions import ParameterConditions, _split_roots, solve_zero_conditions
from .errors import (
    CannotSolveError,
    HomotopyDegeneracyError,
    JetOrderError,
    NotADivergenceError,
    OutOfScopeError,
)
from .expr import Expr, JetVar, _Builder, pdiff, substitute
from .jet import (
    VectorField,
    apply_prolonged,
    divergence,
    euler_operator,
    higher_euler_first,
    prolong,
    total_derivative,
)

VARIATIONAL = "variational"
DIVERGENCE = "divergence"
CONDITIONAL = "conditional"
NEITHER = "neither"


@dataclass(frozen=True)
class DivergenceCertificate:
    """Potentials whose total divergence equals ``residual`` (checked on construction)."""

    potentials: tuple[Expr, ...]
    residual: Expr
    excluded: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if divergence(self.potentials, self.residual.ctx) != self.residual:
            raise ValueError("certificate potentials do not reproduce the residual")


@dataclass(frozen=True)
class SymmetryVerdict:
    generator: str
    residual: Expr
    status: str
    conditions: ParameterConditions | None = None
    certificate: DivergenceCertificate | None = None
    # "residual" when the conditions make the residual vanish, "euler" when
    # they only make it a total divergence
    conditions_on: str | None = None

    @property
    def passed(self) -> bool:
        return self.status in (VARIATIONAL, DIVERGENCE)


def variational_residual(lagrangian: Expr, w: VectorField) -> Expr:
    """pr^(1) W(L) + L * sum_i D_i xi_i; zero iff W is a variational symmetry."""
    if lagrangian.jet_order() > 1:
        raise JetOrderError("the variational criterion needs a first-order Lagrangian")
    ctx = lagrangian.ctx
    div_xi = ctx.zero()
    for v, x in zip(ctx.independent, w.xi):
        div_xi = div_xi + total_derivative(x, v)
    return apply_prolonged(prolong(w, 1), lagrangian) + lagrangian * div_xi


def jet_free_part(r: Expr) -> Expr:
    """Terms of ``r`` involving neither u nor any of its derivatives."""
    b = _Builder(r.ctx)
    for key, c in r.items():
        if not any(isinstance(v, JetVar) for v, _ in key):
            b.add_key(key, c)
    return b.build()


def _require_jet_dependent(r: Expr):
    free = jet_free_part(r)
    if free:
        raise OutOfScopeError(
            f"terms without u or its derivatives are outside the decidable class: {free}"
        )


def is_total_divergence(r: Expr) -> bool:
    """True iff E(r) vanishes identically (r of jet order <= 2, every term u-dependent)."""
    if r.jet_order() > 2:
        raise JetOrderError("divergence detection is implemented for jet order <= 2")
    _require_jet_dependent(r)
    return euler_operator(r).is_zero()


def _u_degree(key) -> AffineExponent:
    deg = AffineExponent()
    for v, e in key:
        if isinstance(v, JetVar):
            deg = deg + e
    return deg


def homotopy_potentials(r: Expr) -> DivergenceCertificate:
    """Potentials phi with Div(phi) == r, by the homotopy formula

        phi_i = int_0^1 [u E^{x_i}(r) + sum_j (1 + [i == j])/2 D_j(u dr/du_ij)][lambda u] dlambda/lambda.

    Only u and its derivatives are scaled; a monomial of total u-degree d
    picks up the factor 1/d.  The second sum vanishes for first-order r.
    """
    ctx = r.ctx
    if r.jet_order() > 2:
        raise JetOrderError("homotopy potentials are implemented for jet order <= 2")
    _require_jet_dependent(r)
    if not euler_operator(r).is_zero():
        raise NotADivergenceError(f"E(R) != 0, so R is not a total divergence: {r}")
    pf = ctx.field
    u = ctx.var(JetVar(ctx.dependent))
    half = Fraction(1, 2)
    excluded: set[Fraction] = set()
    potentials = []
    for v in ctx.independent:
        integrand = u * higher_euler_first(r, v)
        if r.jet_order() == 2:
            for j in ctx.independent:
                d = pdiff(r, ctx.jet(v, j))
                if d:
                    integrand = integrand + total_derivative(u * d, j) * (1 if j == v else half)
        b = _Builder(ctx)
        for key, c in integrand.items():
            d = _u_degree(key)
            if d.is_zero:
                raise HomotopyDegeneracyError(f"monomial {Expr(ctx, {key: c})} has total u-degree 0")
            if d.is_constant:
                factor = ParamRational(1 / d.constant)
            else:
                dc = pf.from_affine(d)
                roots, _ = _split_roots(dc.numer(pf), pf.ring)
                excluded.update(roots)
                factor = 1 / dc
            b.add_key(key, c * factor)
        potentials.append(b.build())
    return DivergenceCertificate(tuple(potentials), r, tuple(sorted(excluded)))


def check_symmetry(lagrangian: Expr, w: VectorField) -> SymmetryVerdict:
    """Classify W as variational, divergence, conditional or neither for L."""
    residual = variational_residual(lagrangian, w)
    if residual.is_zero():
        return SymmetryVerdict(w.name, residual, VARIATIONAL)
    extra = [lagrangian, *w.xi, w.eta]
    e_res = euler_operator(residual)
    if e_res.is_zero() and not jet_free_part(residual):
        return SymmetryVerdict(w.name, residual, DIVERGENCE, certificate=homotopy_potentials(residual))
    cond = solve_zero_conditions(residual, also_exclude=extra)
    if cond.roots or cond.unsolved or not cond.solved:
        return SymmetryVerdict(w.name, residual, CONDITIONAL, conditions=cond, conditions_on="residual")
    cond_e = solve_zero_conditions(e_res, also_exclude=[residual, *extra])
    if not jet_free_part(residual) and (cond_e.roots or cond_e.unsolved or not cond_e.solved):
        return SymmetryVerdict(w.name, residual, CONDITIONAL, conditions=cond_e, conditions_on="euler")
    return SymmetryVerdict(w.name, residual, NEITHER, conditions=cond)


def default_solved_variable(eq: Expr) -> JetVar:
    """First second-order jet variable (declared order) with a constant nonzero coefficient."""
    ctx = eq.ctx
    for j in ctx.jets_up_to(2):
        if j.order != 2 or j not in eq.jet_variables():
            continue
        if _solvable_coefficient(eq, j) is not None:
            return j
    raise CannotSolveError("no second-order jet variable has a constant nonzero coefficient")


def _solvable_coefficient(eq: Expr, j: JetVar) -> ParamRational | None:
    d = pdiff(eq, j)
    if d.is_zero() or not d.is_constant():
        return None
    return d.as_coefficient()


def pde_symmetry_residual(eq: Expr, w: VectorField, solved: JetVar | str | None = None) -> Expr:
    """pr^(2) W(eq) with ``solved`` eliminated using eq == 0."""
    ctx = eq.ctx
    if eq.jet_order() > 2:
        raise JetOrderError("PDE admittance is implemented for jet order <= 2")
    if solved is None:
        solved = default_solved_variable(eq)
    elif isinstance(solved, str):
        solved = ctx.resolve(solved)
    if not isinstance(solved, JetVar) or solved.order != 2:
        raise CannotSolveError(f"{solved} is not a second-order jet variable")
    coef = _solvable_coefficient(eq, solved)
    if coef is None:
        raise CannotSolveError(f"{ctx.jet_name(solved)} does not enter the equation with a constant nonzero coefficient")
    s = ctx.var(solved)
    rest = eq - s * coef
    if solved in rest.jet_variables():
        raise CannotSolveError(f"equation is not affine in {ctx.jet_name(solved)}")
    on_shell = -rest / coef
    action = apply_prolonged(prolong(w, 2), eq)
    return substitute(action, solved, on_shell)


def check_pde_symmetry(eq: Expr, w: VectorField, solved: JetVar | str | None = None) -> bool:
    """True iff W is admitted by eq == 0 (the on-shell prolonged action vanishes)."""
    return pde_symmetry_residual(eq, w, solved).is_zero()


def certificate_matches(cert: DivergenceCertificate, expected: Sequence[Expr]) -> bool:
    return tuple(cert.potentials) == tuple(expected)
