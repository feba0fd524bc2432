"""Exact rational functions in the jets of the metric functions A, B, C.

A jet variable ``X^(k)`` stands for the k-th t-derivative of one of the
metric functions.  Expressions live in the fraction field
``Q(A, A', ..., C^(n))`` and are kept in a canonical reduced form, so that
"this expression vanishes" and "these two expressions agree" are plain
equality checks.

The polynomial GCD machinery comes from sympy's sparse ``PolyElement`` /
``FracElement`` types over ZZ with graded-lex order; everything that is
specific to jets (the formal derivative, elimination of primes through the
flow equations, rendering) is implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational

from sympy import ZZ
from sympy.polys.fields import field
from sympy.polys.orderings import grlex

__all__ = [
    "BASES",
    "DEFAULT_MAX_ORDER",
    "Jet",
    "JetOrderError",
    "JetSpace",
    "JetVariable",
    "SingularPointError",
    "DEFAULT_SPACE",
    "var",
    "const",
    "normalize",
    "t_derivative",
    "substitute_flow",
    "evaluate",
    "flow_rhs",
]

BASES = ("A", "B", "C")
DEFAULT_MAX_ORDER = 3


class JetOrderError(ValueError):
    """A derivative would exceed the configured maximum jet order."""


class SingularPointError(ZeroDivisionError):
    """The denominator vanishes at the requested evaluation point."""


@dataclass(frozen=True, order=True)
class JetVariable:
    base: str
    order: int = 0

    def __post_init__(self):
        if self.base not in BASES:
            raise ValueError(f"unknown jet base {self.base!r}")
        if self.order < 0:
            raise ValueError("jet order must be nonnegative")

    def __str__(self):
        return self.base + "'" * self.order


class JetSpace:
    """The field of rational functions in jets up to ``max_order``.

    Generators are ordered ``A, A', ..., B, B', ..., C, ...`` and monomials
    are compared graded-lexicographically, which fixes the canonical term
    order used for normalization and rendering.
    """

    def __init__(self, max_order: int = DEFAULT_MAX_ORDER):
        if max_order < 1:
            raise ValueError("max_order must be at least 1")
        self.max_order = max_order
        self.variables = tuple(
            JetVariable(b, k) for b in BASES for k in range(max_order + 1)
        )
        names = [f"{v.base}{v.order}" for v in self.variables]
        self.field, *_ = field(names, ZZ, grlex)
        self.ring = self.field.ring
        self._index = {v: i for i, v in enumerate(self.variables)}

    def __repr__(self):
        return f"JetSpace(max_order={self.max_order})"

    # -- construction -----------------------------------------------------

    def index(self, v: JetVariable) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise JetOrderError(
                f"{v} exceeds the maximum jet order {self.max_order}"
            ) from None

    def var(self, base: str, order: int = 0) -> Jet:
        i = self.index(JetVariable(base, order))
        return Jet(self, self.field.new(self.ring.gens[i]))

    def const(self, value) -> Jet:
        q = Fraction(value)
        num = self.ring.ground_new(q.numerator)
        den = self.ring.ground_new(q.denominator)
        return Jet(self, self.field.new(num, den))

    def normalize(self, num, den=1) -> Jet:
        """Canonical reduced representative of ``num / den``.

        Both arguments may be jet polynomials (sympy ``PolyElement`` of this
        space's ring), Jets, or rational numbers.
        """
        n = self._as_frac(num)
        d = self._as_frac(den)
        if not d:
            raise ZeroDivisionError("zero denominator")
        return Jet(self, n / d)

    def _as_frac(self, x):
        if isinstance(x, Jet):
            if x.space is not self:
                raise ValueError("jets from different spaces")
            return x.frac
        if isinstance(x, (int, Rational)):
            return self.const(x).frac
        if getattr(x, "ring", None) == self.ring:
            return self.field.new(x)
        raise TypeError(f"cannot interpret {type(x).__name__} as a jet")

    # -- derivative -------------------------------------------------------

    def _poly_derivative(self, p):
        degs = p.degrees()
        gens = self.ring.gens
        out = self.ring.zero
        for i, v in enumerate(self.variables):
            if degs[i] <= 0:
                continue
            if v.order == self.max_order:
                raise JetOrderError(
                    f"derivative of {v} exceeds the maximum jet order {self.max_order}"
                )
            out += p.diff(gens[i]) * gens[i + 1]
        return out

    def t_derivative(self, f: Jet) -> Jet:
        p, q = f.frac.numer, f.frac.denom
        dp = self._poly_derivative(p)
        if q.is_ground:
            return Jet(self, self.field.new(dp, q))
        dq = self._poly_derivative(q)
        return Jet(self, self.field.new(dp * q - p * dq, q * q))

    # -- flow substitution ------------------------------------------------

    @cached_property
    def rhs(self) -> dict[str, Jet]:
        A, B, C = (self.var(b) for b in BASES)
        return {
            "A": (2 * A**2 - B**2 - C**2) / (B * C),
            "B": (B**2 - C**2 - 2 * A**2) / (C * A),
            "C": (C**2 - 2 * A**2 - B**2) / (A * B),
        }

    @cached_property
    def _flow_table(self):
        # generator index -> (numerator, denominator) of its prime-free value
        table = {}
        for b in BASES:
            table[self.index(JetVariable(b, 0))] = (
                self.ring.gens[self.index(JetVariable(b, 0))],
                self.ring.one,
            )
        for b in BASES:
            r = self.rhs[b]
            table[self.index(JetVariable(b, 1))] = (r.frac.numer, r.frac.denom)
        # X^(k+1) = d/dt of X^(k) with first-order primes eliminated
        for k in range(1, self.max_order):
            for b in BASES:
                prev = table[self.index(JetVariable(b, k))]
                dprev = self.t_derivative(Jet(self, self.field.new(*prev)))
                num, den = self._compose(dprev.frac.numer, table)
                num2, den2 = self._compose(dprev.frac.denom, table)
                val = self.field.new(num * den2, den * num2)
                table[self.index(JetVariable(b, k + 1))] = (val.numer, val.denom)
        return table

    def _compose(self, p, table):
        """Substitute rational values for generators; returns (P, D) with p(values) = P/D."""
        degs = p.degrees()
        used = [i for i, d in enumerate(degs) if d > 0]
        denom = self.ring.one
        for i in used:
            denom *= table[i][1] ** degs[i]
        powers = {}

        def power(i, e, which):
            key = (i, e, which)
            if key not in powers:
                powers[key] = table[i][which] ** e
            return powers[key]

        total = self.ring.zero
        for monom, c in p.terms():
            term = self.ring.ground_new(c)
            for i in used:
                e = monom[i]
                if e:
                    term *= power(i, e, 0)
                if degs[i] - e:
                    term *= power(i, degs[i] - e, 1)
            total += term
        return total, denom

    def substitute_flow(self, f: Jet) -> Jet:
        table = self._flow_table
        if f.is_prime_free():
            return f
        pn, dn = self._compose(f.frac.numer, table)
        pd, dd = self._compose(f.frac.denom, table)
        return Jet(self, self.field.new(pn * dd, dn * pd))

    # -- numerics ---------------------------------------------------------

    def evaluate(self, f: Jet, a: float, b: float, c: float) -> float:
        if not f.is_prime_free():
            raise ValueError("expression contains derivative jets; apply substitute_flow first")
        point = {self.index(JetVariable(x, 0)): float(v) for x, v in zip(BASES, (a, b, c))}

        def value(p):
            total = 0.0
            for monom, coeff in p.terms():
                term = float(coeff)
                for i, e in enumerate(monom):
                    if e:
                        term *= point[i] ** e
                total += term
            return total

        den = value(f.frac.denom)
        if den == 0.0:
            raise SingularPointError("singular evaluation point")
        return value(f.frac.numer) / den

    # -- rendering --------------------------------------------------------

    def render_poly(self, p) -> str:
        if not p:
            return "0"
        parts = []
        for monom, c in p.terms():
            factors = []
            for i, e in enumerate(monom):
                if e:
                    name = str(self.variables[i])
                    factors.append(name if e == 1 else f"{name}^{e}")
            mag = abs(int(c))
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


class Jet:
    """Immutable element of a :class:`JetSpace`, always in reduced form."""

    __slots__ = ("space", "frac")

    def __init__(self, space: JetSpace, frac):
        self.space = space
        self.frac = frac

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other.frac
        if isinstance(other, (int, Rational)):
            return self.space.const(other).frac
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Jet(self.space, self.frac + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Jet(self.space, self.frac - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Jet(self.space, o - self.frac)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Jet(self.space, self.frac * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by the zero jet")
        return Jet(self.space, self.frac / o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not self.frac:
            raise ZeroDivisionError("division by the zero jet")
        return Jet(self.space, o / self.frac)

    def __neg__(self):
        return Jet(self.space, -self.frac)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0 and not self.frac:
            raise ZeroDivisionError("negative power of the zero jet")
        return Jet(self.space, self.frac**n)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.frac == o

    def __hash__(self):
        return hash(self.frac)

    def __bool__(self):
        return bool(self.frac)

    @property
    def numer(self):
        return self.frac.numer

    @property
    def denom(self):
        return self.frac.denom

    def is_polynomial(self) -> bool:
        return self.frac.denom.is_ground and self.frac.denom == self.space.ring.one

    def degrees(self) -> dict[JetVariable, int]:
        """Max degree of each jet variable in numerator or denominator."""
        dn = self.frac.numer.degrees()
        dd = self.frac.denom.degrees()
        return {
            v: max(dn[i], dd[i], 0)
            for i, v in enumerate(self.space.variables)
            if max(dn[i], dd[i]) > 0
        }

    def jet_order(self) -> int:
        return max((v.order for v in self.degrees()), default=0)

    def is_prime_free(self) -> bool:
        return self.jet_order() == 0

    def __str__(self):
        sp = self.space
        num = sp.render_poly(self.frac.numer)
        den = self.frac.denom
        if den == sp.ring.one:
            return num
        if len(self.frac.numer) > 1:
            num = f"({num})"
        den_s = sp.render_poly(den)
        if len(den) > 1:
            den_s = f"({den_s})"
        else:
            (monom, c), = den.terms()
            factors = sum(1 for e in monom if e) + (c != 1)
            if factors > 1:
                den_s = f"({den_s})"
        return f"{num}/{den_s}"

    def __repr__(self):
        return f"Jet({self})"


DEFAULT_SPACE = JetSpace()


def var(base: str, order: int = 0, space: JetSpace = DEFAULT_SPACE) -> Jet:
    return space.var(base, order)


def const(value, space: JetSpace = DEFAULT_SPACE) -> Jet:
    return space.const(value)


def normalize(num, den=1, space: JetSpace = DEFAULT_SPACE) -> Jet:
    return space.normalize(num, den)


def t_derivative(f: Jet) -> Jet:
    """Formal d/dt: ``X^(k) -> X^(k+1)`` extended by the Leibniz rule."""
    return f.space.t_derivative(f)


def substitute_flow(f: Jet) -> Jet:
    """Eliminate every derivative jet using the first-order flow equations."""
    return f.space.substitute_flow(f)


def evaluate(f: Jet, a: float, b: float, c: float) -> float:
    return f.space.evaluate(f, a, b, c)


def flow_rhs(space: JetSpace = DEFAULT_SPACE) -> dict[str, Jet]:
    """Right-hand sides of the flow: ``{"A": A', "B": B', "C": C'}``."""
    return dict(space.rhs)
