"""Canonical sparse expressions over space and jet variables.

An ``Expr`` is a finite sum of monomials ``c * prod(v^e)`` where ``c`` lies in
the parameter field Q(params) and every exponent ``e`` is affine in the
parameters.  The term dictionary is the canonical form: like terms are merged,
zero coefficients and zero exponents are dropped, and two expressions are equal
as functions iff their dictionaries are equal.

Parameters may also appear as bases of non-integer powers (``lam^p``, needed
when a substitution scales a variable by a parameter).  Such powers keep only
the fractional/symbolic part of the exponent; the integer part of the constant
is moved into the coefficient, which keeps the representation unique.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Union

from .coefficients import AffineExponent, ParamRational, parameter_field
from .errors import ContextMismatchError, UnsupportedPowerError

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
RESERVED = frozenset({"d"})


@dataclass(frozen=True)
class SpaceVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class JetVar:
    """u_J: the dependent variable differentiated along the sorted multi-index J."""

    dependent: str
    index: tuple[str, ...] = ()

    @property
    def order(self) -> int:
        return len(self.index)

    def __str__(self):
        if not self.index:
            return self.dependent
        return f"d({self.dependent},{','.join(self.index)})"


@dataclass(frozen=True)
class Parameter:
    name: str

    def __str__(self):
        return self.name


Var = Union[SpaceVar, JetVar, Parameter]
Powers = tuple  # tuple[tuple[Var, AffineExponent], ...], sorted by _storage_key


def _storage_key(item):
    v = item[0]
    if isinstance(v, SpaceVar):
        return (0, v.name, ())
    if isinstance(v, JetVar):
        return (1, v.dependent, (len(v.index),) + v.index)
    return (2, v.name, ())


@dataclass(frozen=True)
class Context:
    """Declared independent variables, dependent variable and parameters."""

    independent: tuple[str, ...]
    dependent: str = "u"
    parameters: tuple[str, ...] = ()
    _cache: dict = dc_field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "independent", tuple(self.independent))
        object.__setattr__(self, "parameters", tuple(self.parameters))
        names = list(self.independent) + [self.dependent] + list(self.parameters)
        for n in names:
            if not isinstance(n, str) or not _IDENT.match(n):
                raise ValueError(f"invalid identifier {n!r}")
            if n in RESERVED:
                raise ValueError(f"{n!r} is reserved for the d(u, ...) derivative form")
        seen = set()
        for n in names:
            if n in seen:
                raise ValueError(f"name {n!r} declared twice")
            seen.add(n)
        if not self.independent:
            raise ValueError("at least one independent variable is required")

    @cached_property
    def field(self):
        return parameter_field(self.parameters)

    @cached_property
    def position(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.independent)}

    @property
    def shorthand(self) -> bool:
        """Whether ``u_xy`` notation is unambiguous (all variable names one letter)."""
        return all(len(n) == 1 for n in self.independent)

    # -- variables -------------------------------------------------------
    def space(self, name: str) -> SpaceVar:
        if name not in self.position:
            raise KeyError(f"{name!r} is not an independent variable")
        return SpaceVar(name)

    def jet(self, *names: str) -> JetVar:
        for n in names:
            if n not in self.position:
                raise KeyError(f"{n!r} is not an independent variable")
        return JetVar(self.dependent, tuple(sorted(names, key=self.position.__getitem__)))

    def extend(self, j: JetVar, name: str) -> JetVar:
        key = ("ext", j, name)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.jet(*j.index, name)
            self._cache[key] = hit
        return hit

    def jets_up_to(self, order: int) -> list[JetVar]:
        from itertools import combinations_with_replacement

        out = []
        for k in range(order + 1):
            for combo in combinations_with_replacement(self.independent, k):
                out.append(JetVar(self.dependent, combo))
        return out

    def resolve(self, name: str) -> Var:
        """Map a plain name (or ``u_xy`` shorthand) to its variable."""
        if name in self.position:
            return SpaceVar(name)
        if name == self.dependent:
            return JetVar(self.dependent)
        if name in self.parameters:
            return Parameter(name)
        prefix = self.dependent + "_"
        if self.shorthand and name.startswith(prefix) and len(name) > len(prefix):
            letters = name[len(prefix):]
            if all(ch in self.position for ch in letters):
                return self.jet(*letters)
        raise KeyError(name)

    def sort_key(self, v: Var):
        """Display order: space variables as declared, then jets by order, then parameters."""
        if isinstance(v, SpaceVar):
            return (0, self.position[v.name])
        if isinstance(v, JetVar):
            return (1, v.order, tuple(self.position[n] for n in v.index))
        return (2, v.name)

    def jet_name(self, j: JetVar) -> str:
        if not j.index:
            return j.dependent
        if self.shorthand:
            return f"{j.dependent}_{''.join(j.index)}"
        return f"d({j.dependent},{','.join(j.index)})"

    # -- expression constructors ------------------------------------------
    def const(self, value) -> "Expr":
        c = value if isinstance(value, ParamRational) else ParamRational(value)
        return Expr(self, {(): c} if c else {})

    def zero(self) -> "Expr":
        return Expr(self, {})

    def var(self, v: Union[str, Var]) -> "Expr":
        if isinstance(v, str):
            v = self.resolve(v)
        if isinstance(v, Parameter):
            return Expr(self, {(): self.field.param(v.name)})
        return Expr(self, {((v, AffineExponent(Fraction(1))),): ParamRational(1)})

    def u(self, *names: str) -> "Expr":
        return self.var(self.jet(*names))

    def parse(self, text: str) -> "Expr":
        from .parser import parse_expr

        return parse_expr(text, self)


def _normalize(ctx: Context, powers: Mapping[Var, AffineExponent]):
    """Canonical Powers tuple plus the coefficient factor split off parameter powers."""
    factor = None
    items = []
    for v, e in powers.items():
        if e.is_zero:
            continue
        if isinstance(v, Parameter):
            k, rest = e.floor_split()
            if k:
                f = ctx.field.param(v.name) ** k
                factor = f if factor is None else factor * f
            if rest.is_zero:
                continue
            e = rest
        items.append((v, e))
    items.sort(key=_storage_key)
    return tuple(items), factor


class _Builder:
    """Accumulates (powers, coefficient) contributions into canonical terms."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.terms: dict = {}

    def add(self, powers: Mapping[Var, AffineExponent], coef: ParamRational):
        if not coef:
            return
        key, factor = _normalize(self.ctx, powers)
        if factor is not None:
            coef = coef * factor
        self.add_key(key, coef)

    def add_key(self, key: Powers, coef: ParamRational):
        old = self.terms.get(key)
        if old is None:
            if coef:
                self.terms[key] = coef
        else:
            new = old + coef
            if new:
                self.terms[key] = new
            else:
                del self.terms[key]

    def build(self) -> "Expr":
        return Expr(self.ctx, self.terms)


@dataclass(frozen=True)
class Monomial:
    coefficient: ParamRational
    powers: Powers

    def power_of(self, v: Var) -> AffineExponent | None:
        for w, e in self.powers:
            if w == v:
                return e
        return None


def _mul_keys(ctx: Context, a: Powers, b: Powers):
    if not a:
        return b, None
    if not b:
        return a, None
    merged = dict(a)
    for v, e in b:
        old = merged.get(v)
        merged[v] = e if old is None else old + e
    return _normalize(ctx, merged)


class Expr:
    """Immutable canonical expression; see module docstring."""

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: Context, terms: dict):
        self.ctx = ctx
        self._terms = terms
        self._hash = None

    @classmethod
    def from_terms(cls, ctx: Context, items: Iterable) -> "Expr":
        b = _Builder(ctx)
        for powers, coef in items:
            if not isinstance(coef, ParamRational):
                coef = ParamRational(coef)
            b.add(dict(powers), coef)
        return b.build()

    # -- inspection -------------------------------------------------------
    def items(self):
        return self._terms.items()

    def monomials(self) -> list[Monomial]:
        return [Monomial(c, k) for k, c in self._terms.items()]

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not k for k in self._terms)

    def as_coefficient(self) -> ParamRational:
        if not self.is_constant():
            raise ValueError(f"{self} is not a parameter-only expression")
        return self._terms.get((), ParamRational(0))

    def variables(self) -> frozenset:
        return frozenset(v for k in self._terms for v, _ in k if not isinstance(v, Parameter))

    def jet_variables(self) -> frozenset:
        return frozenset(v for k in self._terms for v, _ in k if isinstance(v, JetVar))

    def jet_order(self) -> int:
        return max((j.order for j in self.jet_variables()), default=0)

    def parameters(self) -> frozenset[str]:
        used = set()
        for k, c in self._terms.items():
            used |= c.parameters()
            for v, e in k:
                if isinstance(v, Parameter):
                    used.add(v.name)
                used.update(n for n, _ in e.slopes)
        return frozenset(used)

    def coefficients(self) -> list[ParamRational]:
        return list(self._terms.values())

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ContextMismatchError("expressions belong to different problem contexts")
            return other
        if isinstance(other, (int, Fraction, ParamRational)):
            return self.ctx.const(other)
        raise TypeError(f"cannot combine Expr with {type(other).__name__}")

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        b = _Builder(self.ctx)
        b.terms = dict(self._terms)
        for k, c in o._terms.items():
            b.add_key(k, c)
        return b.build()

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.ctx, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "Expr":
        c = c if isinstance(c, ParamRational) else ParamRational(c)
        if not c:
            return Expr(self.ctx, {})
        return Expr(self.ctx, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ParamRational)):
            return self.scale(other)
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        b = _Builder(self.ctx)
        ctx = self.ctx
        for ka, ca in self._terms.items():
            for kb, cb in o._terms.items():
                key, factor = _mul_keys(ctx, ka, kb)
                c = ca * cb
                if factor is not None:
                    c = c * factor
                b.add_key(key, c)
        return b.build()

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Expr):
            self._lift(other)
            if not other.is_constant():
                raise ValueError("division by a variable-dependent expression")
            other = other.as_coefficient()
        c = other if isinstance(other, ParamRational) else ParamRational(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self.scale(1 / c)

    def __pow__(self, e):
        return pow_expr(self, e)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ParamRational)):
            other = self.ctx.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation -------------------------------------------------------
    def evaluate(self, point: Mapping, params: Mapping[str, object] | None = None) -> Fraction:
        """Exact value at ``point`` (keys: Var objects or names like ``"u_x"``)."""
        params = dict(params or {})
        values = {}
        for k, val in point.items():
            v = self.ctx.resolve(k) if isinstance(k, str) else k
            values[v] = Fraction(val)
        total = Fraction(0)
        for key, c in self._terms.items():
            term = c.evaluate(params)
            for v, e in key:
                base = Fraction(params[v.name]) if isinstance(v, Parameter) else values[v]
                x = e.value(params)
                if x.denominator != 1:
                    raise ValueError(f"non-integer power {x} of {v} at evaluation")
                term *= base ** int(x)
            total += term
        return total

    def __str__(self):
        from .parser import print_expr

        return print_expr(self)

    def __repr__(self):
        return f"Expr({self})"


def _resolve_var(ctx: Context, v) -> Var:
    if isinstance(v, Expr):
        if len(v) == 1:
            ((key, c),) = v.items()
            if c == 1 and len(key) == 1 and key[0][1] == AffineExponent(Fraction(1)):
                return key[0][0]
        raise ValueError(f"{v} is not a single variable")
    if isinstance(v, str):
        return ctx.resolve(v)
    return v


def _exponent(e) -> AffineExponent:
    if isinstance(e, AffineExponent):
        return e
    if isinstance(e, (int, Fraction)):
        return AffineExponent(Fraction(e))
    if isinstance(e, ParamRational):
        a = e.to_affine()
        if a is None:
            raise UnsupportedPowerError(f"exponent {e} is not affine in the parameters")
        return a
    if isinstance(e, Expr):
        if not e.is_constant():
            raise UnsupportedPowerError(f"exponent {e} depends on variables")
        return _exponent(e.as_coefficient())
    raise TypeError(f"bad exponent {e!r}")


def pow_expr(a: Expr, e) -> Expr:
    """a^e: repeated multiplication for e in N, otherwise a single-monomial power."""
    e = _exponent(e)
    if e.is_nonnegative_integer:
        k = int(e.constant)
        result = a.ctx.const(1)
        base = a
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result
    if len(a) != 1:
        if not a:
            if e.is_integer:
                raise ZeroDivisionError("zero to a negative power")
            raise UnsupportedPowerError("symbolic power of zero")
        raise UnsupportedPowerError(f"power {e} of a multi-term expression ({a}) is not representable")
    ((key, c),) = a.items()
    powers = {}
    for v, ev in key:
        try:
            powers[v] = ev.scale(e)
        except ValueError as exc:
            raise UnsupportedPowerError(str(exc)) from None
    if e.is_integer:
        coef = c ** int(e.constant)
    else:
        mono = c.monomial_powers()
        if mono is None:
            raise UnsupportedPowerError(f"symbolic power {e} of the coefficient {c}")
        coef = ParamRational(1)
        for name, k in mono.items():
            pv = Parameter(name)
            powers[pv] = powers.get(pv, AffineExponent()) + e * k
    return Expr.from_terms(a.ctx, [(powers, coef)])


# Spec-facing functional API -------------------------------------------------

def add(a: Expr, b: Expr) -> Expr:
    return a + b


def mul(a: Expr, b: Expr) -> Expr:
    return a * b


def neg(a: Expr) -> Expr:
    return -a


def pow(a: Expr, e) -> Expr:  # noqa: A001 - mirrors the operation name
    return pow_expr(a, e)


def pdiff(a: Expr, v) -> Expr:
    """Partial derivative, all other variables held fixed."""
    v = _resolve_var(a.ctx, v)
    if isinstance(v, Parameter):
        raise ValueError("differentiation with respect to a parameter is not supported")
    b = _Builder(a.ctx)
    field = a.ctx.field
    one = AffineExponent(Fraction(1))
    for key, c in a.items():
        for i, (w, e) in enumerate(key):
            if w != v:
                continue
            ec = ParamRational(e.constant) if e.is_constant else field.from_affine(e)
            rest = e - one
            if rest.is_zero:
                new_key = key[:i] + key[i + 1:]
            else:
                new_key = key[:i] + ((w, rest),) + key[i + 1:]
            b.add_key(new_key, c * ec)
            break
    return b.build()


def substitute(a: Expr, v, r) -> Expr:
    """Replace every occurrence of the variable ``v`` in ``a`` by ``r``."""
    ctx = a.ctx
    v = _resolve_var(ctx, v)
    r = a._lift(r)
    cache: dict = {}
    b = _Builder(ctx)
    for key, c in a.items():
        e = None
        rest = []
        for w, ew in key:
            if w == v:
                e = ew
            else:
                rest.append((w, ew))
        if e is None:
            b.add_key(key, c)
            continue
        rp = cache.get(e)
        if rp is None:
            rp = pow_expr(r, e)
            cache[e] = rp
        rest_key = tuple(rest)
        for kr, cr in rp.items():
            new_key, factor = _mul_keys(ctx, rest_key, kr)
            coef = c * cr
            if factor is not None:
                coef = coef * factor
            b.add_key(new_key, coef)
    return b.build()
