"""Parameter values for which an expression vanishes identically."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .coefficients import ParamRational, format_poly
from .expr import Expr


@dataclass(frozen=True)
class ParameterConditions:
    """Outcome of :func:`solve_zero_conditions`.

    ``vanishing`` holds one content-normalized numerator per monomial; the
    expression is identically zero iff all of them vanish.  ``roots`` and
    ``unsolved`` describe the common zeros when a single parameter occurs
    (``solved`` is then True); ``excluded`` lists poles of the coefficients.
    """

    vanishing: tuple[ParamRational, ...] = ()
    roots: tuple[Fraction, ...] = ()
    unsolved: tuple[ParamRational, ...] = ()
    excluded: tuple[Fraction, ...] = ()
    excluded_unsolved: tuple[ParamRational, ...] = ()
    parameter: str | None = None
    always_zero: bool = False
    solved: bool = True
    parameters: tuple[str, ...] = field(default=())

    @property
    def never_zero(self) -> bool:
        return self.solved and not self.always_zero and not self.roots and not self.unsolved

    @property
    def has_roots(self) -> bool:
        return bool(self.roots)

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "always_zero": self.always_zero,
            "solved": self.solved,
            "vanishing": [str(v) for v in self.vanishing],
            "roots": [_qtext(r) for r in self.roots],
            "unsolved": [str(v) for v in self.unsolved],
            "excluded": [_qtext(r) for r in self.excluded],
            "excluded_unsolved": [str(v) for v in self.excluded_unsolved],
        }

    def describe(self) -> str:
        if self.always_zero:
            return "identically zero"
        if not self.solved:
            return "conditions: " + ", ".join(f"{v} = 0" for v in self.vanishing)
        if not self.roots and not self.unsolved:
            return "never zero"
        parts = [f"{self.parameter} = {_qtext(r)}" for r in self.roots]
        parts += [f"{v} = 0" for v in self.unsolved]
        text = "zero iff " + " or ".join(parts)
        if self.excluded:
            text += f" ({self.parameter} != {', '.join(_qtext(r) for r in self.excluded)})"
        return text


def _qtext(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _degree(poly) -> int:
    return max((sum(m) for m in poly.monoms()), default=0)


def _normalize(poly):
    _, prim = poly.primitive()
    if prim.LC < 0:
        prim = -prim
    return prim


def _split_roots(poly, ring):
    """Rational roots of ``poly`` (linear factors) and its remaining irreducible factors."""
    roots, rest = [], []
    if poly.is_ground:
        return roots, rest
    _, factors = poly.factor_list()
    for f, _mult in factors:
        terms = dict(f.terms())
        if _degree(f) == 1 and sum(1 for m in terms if sum(m)) == 1:
            (lin_m, a), = [(m, c) for m, c in terms.items() if sum(m)]
            b = terms.get((0,) * ring.ngens, 0)
            roots.append(Fraction(-int(b), int(a)))
        else:
            rest.append(_normalize(f))
    return roots, rest


def _as_param(poly, pf) -> ParamRational:
    return ParamRational(pf.frac_field.field_new(poly))


def solve_zero_conditions(a: Expr, also_exclude: Iterable[Expr] = ()) -> ParameterConditions:
    """Conditions on the parameters under which ``a`` is identically zero.

    Poles of ``a``'s coefficients (and of any expression in ``also_exclude``)
    populate ``excluded``; roots lying there are discarded.
    """
    pf = a.ctx.field
    ring = pf.ring

    denominators = []
    seen_den = set()
    for e in [a, *also_exclude]:
        for c in e.coefficients():
            d = c.denom(pf)
            if not d.is_ground and d not in seen_den:
                seen_den.add(d)
                denominators.append(d)

    excluded: set[Fraction] = set()
    excluded_rest = []
    for d in denominators:
        rs, rest = _split_roots(d, ring)
        excluded.update(rs)
        for r in rest:
            if r not in excluded_rest:
                excluded_rest.append(r)
    excluded_t = tuple(sorted(excluded))
    excluded_u = tuple(_as_param(r, pf) for r in excluded_rest)

    if a.is_zero():
        return ParameterConditions(excluded=excluded_t, excluded_unsolved=excluded_u, always_zero=True)

    numerators = []
    for c in a.coefficients():
        n = _normalize(c.numer(pf))
        if n not in numerators:
            numerators.append(n)
    numerators.sort(key=lambda p: (_degree(p), format_poly(p)))
    used = sorted(set().union(*(c.parameters() for c in a.coefficients())))
    vanishing = tuple(_as_param(n, pf) for n in numerators)

    if len(used) > 1:
        return ParameterConditions(
            vanishing=vanishing, excluded=excluded_t, excluded_unsolved=excluded_u,
            solved=False, parameters=tuple(used),
        )

    g = numerators[0]
    for n in numerators[1:]:
        g = g.gcd(n)
        if g.is_ground:
            break
    roots, rest = _split_roots(g, ring) if not g.is_ground else ([], [])
    roots = sorted(set(r for r in roots if r not in excluded))
    return ParameterConditions(
        vanishing=vanishing,
        roots=tuple(roots),
        unsolved=tuple(_as_param(r, pf) for r in rest),
        excluded=excluded_t,
        excluded_unsolved=excluded_u,
        parameter=used[0] if used else None,
        parameters=tuple(used),
    )
