"""Coefficient field and exponent arithmetic.

Coefficients are elements of Q(p1, ..., pk), the field of rational functions
in the declared parameters.  Parameter-free coefficients are stored as
``Fraction`` (the overwhelmingly common case); the rest are reduced
``FracElement`` values of a sympy rational-function field over ZZ, which
keeps numerator and denominator coprime with a positive leading denominator
coefficient in lex order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

from sympy.polys.domains import ZZ
from sympy.polys.fields import FracElement, field

Number = Union[int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


class ParameterField:
    """The field Q(params); one instance per tuple of parameter names."""

    def __init__(self, names: tuple[str, ...]):
        self.names = tuple(names)
        self.frac_field = field(list(self.names), ZZ)[0] if self.names else field([], ZZ)[0]
        self.ring = self.frac_field.ring

    def __repr__(self):
        return f"ParameterField({self.names!r})"

    def const(self, value: Number) -> "ParamRational":
        return ParamRational(_as_fraction(value))

    def param(self, name: str) -> "ParamRational":
        idx = self.names.index(name)
        return ParamRational(self.frac_field.gens[idx])

    def lift(self, q: Fraction) -> FracElement:
        return self.frac_field.raw_new(self.ring(int(q.numerator)), self.ring(int(q.denominator)))

    def from_affine(self, e: "AffineExponent") -> "ParamRational":
        out = ParamRational(e.constant)
        for name, slope in e.slopes:
            out = out + self.param(name) * slope
        return out


@lru_cache(maxsize=None)
def parameter_field(names: tuple[str, ...]) -> ParameterField:
    return ParameterField(names)


class ParamRational:
    """An element of Q(params).  Immutable; compares and hashes by value."""

    __slots__ = ("_v",)

    def __init__(self, value: Union[Number, FracElement, "ParamRational"] = 0):
        if isinstance(value, ParamRational):
            value = value._v
        elif isinstance(value, FracElement):
            num, den = value.numer, value.denom
            if num.is_ground and den.is_ground:
                value = Fraction(int(num.LC), int(den.LC))
        elif not isinstance(value, Fraction):
            value = _as_fraction(value)
        self._v = value

    # -- structure -----------------------------------------------------
    @property
    def is_constant(self) -> bool:
        return isinstance(self._v, Fraction)

    @property
    def constant(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} depends on parameters")
        return self._v

    @property
    def element(self):
        return self._v

    def parameters(self) -> frozenset[str]:
        if self.is_constant:
            return frozenset()
        f = self._v
        names = f.field.ring.symbols
        used = set()
        for poly in (f.numer, f.denom):
            for monom in poly.monoms():
                used.update(str(names[i]) for i, k in enumerate(monom) if k)
        return frozenset(used)

    def numer(self, pf: ParameterField):
        """Numerator as a polynomial of ``pf.ring`` (integer coefficients)."""
        if self.is_constant:
            return pf.ring(int(self._v.numerator))
        return pf.ring(self._v.numer) if self._v.field is not pf.frac_field else self._v.numer

    def denom(self, pf: ParameterField):
        if self.is_constant:
            return pf.ring(int(self._v.denominator))
        return pf.ring(self._v.denom) if self._v.field is not pf.frac_field else self._v.denom

    def is_zero(self) -> bool:
        return self.is_constant and self._v == 0

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic ----------------------------------------------------
    @staticmethod
    def _coerce(other) -> "ParamRational | None":
        if isinstance(other, ParamRational):
            return other
        if isinstance(other, (int, Fraction)):
            return ParamRational(other)
        return None

    def _pair(self, other: "ParamRational"):
        a, b = self._v, other._v
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return a, b
        if isinstance(a, Fraction):
            return b.field.raw_new(b.field.ring(int(a.numerator)), b.field.ring(int(a.denominator))), b
        if isinstance(b, Fraction):
            return a, a.field.raw_new(a.field.ring(int(b.numerator)), a.field.ring(int(b.denominator)))
        if a.field != b.field:
            raise ValueError("coefficients from different parameter fields")
        return a, b

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._pair(o)
        return ParamRational(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._pair(o)
        return ParamRational(a - b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._pair(o)
        return ParamRational(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by the zero coefficient")
        a, b = self._pair(o)
        return ParamRational(a / b)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return ParamRational(-self._v)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0 and self.is_zero():
            raise ZeroDivisionError("zero coefficient to a negative power")
        return ParamRational(self._v**k)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._v, o._v
        if isinstance(a, Fraction) != isinstance(b, Fraction):
            return False
        if isinstance(a, Fraction):
            return a == b
        return a.field == b.field and a == b

    def __hash__(self):
        if isinstance(self._v, Fraction):
            return hash(self._v)
        return hash((tuple(self._v.numer.terms()), tuple(self._v.denom.terms())))

    # -- evaluation / conversion ----------------------------------------
    def evaluate(self, params: Mapping[str, Number]) -> Fraction:
        """Exact value under a parameter assignment; ZeroDivisionError at poles."""
        if self.is_constant:
            return self._v
        names = [str(s) for s in self._v.field.ring.symbols]
        vals = [_as_fraction(params[n]) for n in names]

        def ev(poly):
            total = Fraction(0)
            for monom, c in poly.terms():
                term = Fraction(int(c))
                for v, k in zip(vals, monom):
                    if k:
                        term *= v**k
                total += term
            return total

        den = ev(self._v.denom)
        if den == 0:
            raise ZeroDivisionError(f"{self} has a pole at {dict(params)}")
        return ev(self._v.numer) / den

    def to_affine(self) -> "AffineExponent | None":
        """The coefficient as an affine function of the parameters, if it is one."""
        if self.is_constant:
            return AffineExponent(self._v)
        f = self._v
        if not f.denom.is_ground:
            return None
        den = int(f.denom.LC)
        names = [str(s) for s in f.field.ring.symbols]
        const = Fraction(0)
        slopes = {}
        for monom, c in f.numer.terms():
            deg = sum(monom)
            if deg == 0:
                const = Fraction(int(c), den)
            elif deg == 1:
                slopes[names[monom.index(1)]] = Fraction(int(c), den)
            else:
                return None
        return AffineExponent.make(const, slopes)

    def monomial_powers(self) -> "dict[str, int] | None":
        """If this is a unit-coefficient Laurent monomial in the parameters, its powers."""
        if self.is_constant:
            return {} if self._v == 1 else None
        f = self._v
        if len(f.numer.terms()) != 1 or len(f.denom.terms()) != 1:
            return None
        (mn, cn), = f.numer.terms()
        (md, cd), = f.denom.terms()
        if cn != 1 or cd != 1:
            return None
        names = [str(s) for s in f.field.ring.symbols]
        return {names[i]: a - b for i, (a, b) in enumerate(zip(mn, md)) if a != b}

    def is_negative(self) -> bool:
        """Sign used for printing: leading numerator coefficient below zero."""
        if self.is_constant:
            return self._v < 0
        return self._v.numer.LC < 0

    def __str__(self):
        return format_coefficient(self)

    def __repr__(self):
        return f"ParamRational({self})"


def format_poly(poly) -> str:
    """Compact text for an integer polynomial, e.g. ``p^2-3*p+2``."""
    names = [str(s) for s in poly.ring.symbols]
    terms = poly.terms()
    if not terms:
        return "0"
    out = []
    for i, (monom, c) in enumerate(terms):
        c = int(c)
        factors = []
        for n, k in zip(names, monom):
            if k == 1:
                factors.append(n)
            elif k:
                factors.append(f"{n}^{k}")
        mag = abs(c)
        if factors:
            body = "*".join(([str(mag)] if mag != 1 else []) + factors)
        else:
            body = str(mag)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("-" if c < 0 else "+") + body)
    return "".join(out)


def _poly_is_atom(poly) -> bool:
    terms = poly.terms()
    if len(terms) != 1:
        return False
    monom, c = terms[0]
    if sum(monom) == 0:
        return True
    return c == 1 and sum(monom) == 1


def coefficient_factor(c: ParamRational) -> str:
    """Text for a positive coefficient written as a leading factor (``3/2``, ``(p-3)/(p-1)``)."""
    if c.is_constant:
        q = c.constant
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    f = c.element
    num, den = f.numer, f.denom
    ntext = format_poly(num)
    if len(num.terms()) > 1:
        ntext = f"({ntext})"
    if den.is_ground and den.LC == 1:
        return ntext
    dtext = format_poly(den)
    if not _poly_is_atom(den):
        dtext = f"({dtext})"
    return f"{ntext}/{dtext}"


def format_coefficient(c: ParamRational) -> str:
    if c.is_negative():
        return "-" + coefficient_factor(-c)
    return coefficient_factor(c)


@dataclass(frozen=True)
class AffineExponent:
    """constant + sum(slope * parameter); closed under + and rational scaling."""

    constant: Fraction = Fraction(0)
    slopes: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def make(cls, constant: Number = 0, slopes: Mapping[str, Number] | None = None) -> "AffineExponent":
        items = tuple(sorted((n, _as_fraction(s)) for n, s in (slopes or {}).items() if s != 0))
        return cls(_as_fraction(constant), items)

    @classmethod
    def of(cls, value) -> "AffineExponent":
        if isinstance(value, AffineExponent):
            return value
        return cls(_as_fraction(value))

    @property
    def is_zero(self) -> bool:
        return self.constant == 0 and not self.slopes

    @property
    def is_constant(self) -> bool:
        return not self.slopes

    @property
    def is_integer(self) -> bool:
        return not self.slopes and self.constant.denominator == 1

    @property
    def is_nonnegative_integer(self) -> bool:
        return self.is_integer and self.constant >= 0

    def __add__(self, other):
        other = AffineExponent.of(other)
        slopes = dict(self.slopes)
        for n, s in other.slopes:
            slopes[n] = slopes.get(n, 0) + s
        return AffineExponent.make(self.constant + other.constant, slopes)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-AffineExponent.of(other))

    def __mul__(self, k):
        k = _as_fraction(k)
        return AffineExponent.make(self.constant * k, {n: s * k for n, s in self.slopes})

    __rmul__ = __mul__

    def scale(self, other: "AffineExponent") -> "AffineExponent":
        """Product of two exponents; defined when at least one is constant."""
        if other.is_constant:
            return self * other.constant
        if self.is_constant:
            return other * self.constant
        raise ValueError("product of two parameter-dependent exponents is not affine")

    def value(self, params: Mapping[str, Number]) -> Fraction:
        return self.constant + sum((s * _as_fraction(params[n]) for n, s in self.slopes), Fraction(0))

    def floor_split(self) -> tuple[int, "AffineExponent"]:
        """(k, rest) with k = floor(constant) and rest having constant in [0, 1)."""
        k = self.constant.numerator // self.constant.denominator
        return k, AffineExponent(self.constant - k, self.slopes)

    def __str__(self):
        if not self.slopes:
            q = self.constant
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        parts = []
        for n, s in self.slopes:
            mag = abs(s)
            if mag == 1:
                body = n
            elif mag.denominator == 1:
                body = f"{mag.numerator}*{n}"
            else:
                body = f"{mag.numerator}/{mag.denominator}*{n}"
            sign = "-" if s < 0 else "+"
            parts.append(body if (not parts and s > 0) else sign + body)
        q = self.constant
        if q:
            mag = abs(q)
            qt = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            parts.append(("-" if q < 0 else "+") + qt)
        return "".join(parts)
