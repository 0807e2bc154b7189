"""Total derivatives, prolongation and Euler operators on the jet space."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .coefficients import AffineExponent, ParamRational
from .errors import JetOrderError
from .expr import Context, Expr, JetVar, SpaceVar, _Builder, _mul_keys, pdiff

MAX_ORDER = 2
_ONE = AffineExponent(Fraction(1))


def _name(ctx: Context, v) -> str:
    if isinstance(v, SpaceVar):
        v = v.name
    if v not in ctx.position:
        raise KeyError(f"{v!r} is not an independent variable")
    return v


def total_derivative(a: Expr, v) -> Expr:
    """D_v a = da/dv + sum over jets u_J of u_{J,v} * da/du_J."""
    ctx = a.ctx
    v = _name(ctx, v)
    sv = SpaceVar(v)
    field = ctx.field
    b = _Builder(ctx)
    for key, c in a.items():
        for i, (w, e) in enumerate(key):
            if isinstance(w, SpaceVar):
                if w != sv:
                    continue
                extra = None
            elif isinstance(w, JetVar):
                extra = ctx.extend(w, v)
            else:
                continue
            ec = ParamRational(e.constant) if e.is_constant else field.from_affine(e)
            rest = e - _ONE
            if rest.is_zero:
                new_key = key[:i] + key[i + 1:]
            else:
                new_key = key[:i] + ((w, rest),) + key[i + 1:]
            coef = c * ec
            if extra is not None:
                new_key, factor = _mul_keys(ctx, new_key, ((extra, _ONE),))
                if factor is not None:
                    coef = coef * factor
            b.add_key(new_key, coef)
    return b.build()


def total_derivative_multi(a: Expr, index: Sequence[str]) -> Expr:
    for v in index:
        a = total_derivative(a, v)
    return a


def divergence(phi: Sequence[Expr], ctx: Context | None = None) -> Expr:
    """Div(phi) = sum_i D_i phi_i, one component per independent variable."""
    phi = list(phi)
    if ctx is None:
        if not phi:
            raise ValueError("empty potential list needs an explicit context")
        ctx = phi[0].ctx
    if len(phi) != len(ctx.independent):
        raise ValueError(f"divergence needs {len(ctx.independent)} components, got {len(phi)}")
    out = ctx.zero()
    for v, comp in zip(ctx.independent, phi):
        out = out + total_derivative(comp, v)
    return out


def _check_point(ctx: Context, e: Expr, what: str):
    for v in e.variables():
        if isinstance(v, JetVar) and v.order:
            raise ValueError(f"{what} depends on the derivative {ctx.jet_name(v)}; only point symmetries are supported")


@dataclass(frozen=True)
class VectorField:
    """W = sum_i xi_i d/dx_i + eta d/du, with coefficients on (x, u) only."""

    name: str
    xi: tuple[Expr, ...]
    eta: Expr

    def __post_init__(self):
        ctx = self.eta.ctx
        if len(self.xi) != len(ctx.independent):
            raise ValueError(f"generator {self.name!r}: expected {len(ctx.independent)} xi components")
        for v, x in zip(ctx.independent, self.xi):
            if x.ctx != ctx:
                raise ValueError(f"generator {self.name!r}: mixed contexts")
            _check_point(ctx, x, f"xi[{v}] of {self.name!r}")
        _check_point(ctx, self.eta, f"eta of {self.name!r}")

    @classmethod
    def make(cls, ctx: Context, name: str, xi: Mapping[str, object] | None = None, eta=0) -> "VectorField":
        """Build from a partial mapping; omitted components are zero, text is parsed."""
        xi = dict(xi or {})
        unknown = set(xi) - set(ctx.independent)
        if unknown:
            raise ValueError(f"generator {name!r}: unknown variables {sorted(unknown)}")

        def lift(val):
            if isinstance(val, Expr):
                return val
            if isinstance(val, str):
                return ctx.parse(val)
            return ctx.const(val)

        return cls(name, tuple(lift(xi.get(v, 0)) for v in ctx.independent), lift(eta))

    @property
    def ctx(self) -> Context:
        return self.eta.ctx

    def component(self, v: str) -> Expr:
        return self.xi[self.ctx.position[v]]

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(f"{self.name}+{other.name}", tuple(a + b for a, b in zip(self.xi, other.xi)), self.eta + other.eta)

    def scaled(self, c) -> "VectorField":
        return VectorField(f"{c}*{self.name}", tuple(x * c for x in self.xi), self.eta * c)


@dataclass(frozen=True)
class ProlongedField:
    base: VectorField
    order: int
    eta_j: Mapping[JetVar, Expr]

    def coefficient(self, j: JetVar) -> Expr:
        return self.eta_j[j]


def prolong(w: VectorField, order: int) -> ProlongedField:
    """Prolongation by eta^{J,i} = D_i(eta^J) - sum_k u_{J,k} D_i(xi^k)."""
    if order < 1:
        raise ValueError("prolongation order must be at least 1")
    ctx = w.ctx
    names = ctx.independent
    dxi = {(i, k): total_derivative(w.xi[k], i) for i in names for k in range(len(names))}
    dxi = {key: val for key, val in dxi.items() if val}
    eta_j: dict[JetVar, Expr] = {JetVar(ctx.dependent): w.eta}
    for j in ctx.jets_up_to(order):
        if not j.index:
            continue
        parent = JetVar(ctx.dependent, j.index[:-1])
        i = j.index[-1]
        val = total_derivative(eta_j[parent], i)
        for k, vk in enumerate(names):
            d = dxi.get((i, k))
            if d is not None:
                val = val - ctx.var(ctx.extend(parent, vk)) * d
        eta_j[j] = val
    return ProlongedField(w, order, eta_j)


def apply_prolonged(wp: ProlongedField, a: Expr) -> Expr:
    """pr W(a) = sum_i xi_i da/dx_i + sum_J eta^J da/du_J."""
    ctx = a.ctx
    if a.jet_order() > wp.order:
        raise JetOrderError(f"expression has jet order {a.jet_order()} but the prolongation has order {wp.order}")
    out = ctx.zero()
    for v, x in zip(ctx.independent, wp.base.xi):
        if x:
            d = pdiff(a, SpaceVar(v))
            if d:
                out = out + x * d
    for j in sorted(a.jet_variables(), key=ctx.sort_key):
        out = out + wp.eta_j[j] * pdiff(a, j)
    return out


def _require_order(a: Expr, limit: int = MAX_ORDER):
    if a.jet_order() > limit:
        raise JetOrderError(f"jet order {a.jet_order()} exceeds the supported maximum {limit}")


def euler_operator(a: Expr) -> Expr:
    """E(a) = sum_J (-D)_J da/du_J; variational derivative of a Lagrangian density."""
    _require_order(a)
    ctx = a.ctx
    out = ctx.zero()
    for j in sorted(a.jet_variables() | {JetVar(ctx.dependent)}, key=ctx.sort_key):
        term = pdiff(a, j)
        if not term:
            continue
        term = total_derivative_multi(term, j.index)
        out = out - term if j.order % 2 else out + term
    return out


def higher_euler_first(a: Expr, v) -> Expr:
    """First higher Euler operator E^v(a) for jet order <= 2.

    E^v = d/du_v - 2 D_v d/du_vv - sum_{j != v} D_j d/du_vj (multi-index
    binomial weights; the u_vv weight is 2).
    """
    _require_order(a)
    ctx = a.ctx
    v = _name(ctx, v)
    out = pdiff(a, ctx.jet(v))
    for j in ctx.independent:
        second = ctx.jet(v, j)
        d = pdiff(a, second)
        if d:
            d = total_derivative(d, j)
            out = out - (d * 2 if j == v else d)
    return out
