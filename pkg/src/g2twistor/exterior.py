"""Exterior calculus on the coframe algebra of the cone over the 3-Sasakian space.

A form is a sum of ``coeff * v ⊗ h`` where ``v`` is a wedge monomial in the
vertical generators ``e0 = dt, η1, η2, η3`` and ``h`` is one of the six
horizontal basis elements::

    1, alpha = 2 η4^η5, beta = 2 η6^η7, omega2, omega3, Omega = η4^η5^η6^η7

with ``omega = alpha + beta`` the lifted Kähler form and
``omega1 = alpha - beta``.  All horizontal elements have even degree, so
wedge signs come only from reordering vertical generators.

The exterior derivative is fixed by its values on generators (the structure
equations of the 3-Sasakian coframe plus ``d omega = 0``) and
``d f = f' e0`` on jet coefficients.  The Hodge star is taken for the
metric ``dt^2 + A^2(η2^2 + η3^2) + B^2(η4^2 + η5^2) + C^2(η6^2 + η7^2)``
with orientation ``e0 e2 e3 e4 e5 e6 e7``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterator, Mapping

from . import jets
from .euclid import EuclidForm, euclid_star, merge_sign, permutation_sign
from .jets import Jet, JetSpace

__all__ = [
    "VERTICAL",
    "HORIZONTAL",
    "HORIZONTAL_DEGREE",
    "Form",
    "StarDomainError",
    "basis_pairs",
    "wedge",
    "d",
    "hodge_star",
    "is_basic",
    "E0",
    "ETA1",
    "ETA2",
    "ETA3",
    "ALPHA",
    "BETA",
    "OMEGA2",
    "OMEGA3",
    "OMEGA_VOL",
]

VERTICAL = ("e0", "n1", "n2", "n3")
HORIZONTAL = ("1", "alpha", "beta", "omega2", "omega3", "Omega")
HORIZONTAL_DEGREE = {"1": 0, "alpha": 2, "beta": 2, "omega2": 2, "omega3": 2, "Omega": 4}

# nonzero products of horizontal basis elements (beyond x * 1 = x)
_H_TABLE = {
    ("alpha", "beta"): (4, "Omega"),
    ("beta", "alpha"): (4, "Omega"),
    ("omega2", "omega2"): (-8, "Omega"),
    ("omega3", "omega3"): (-8, "Omega"),
}


class StarDomainError(ValueError):
    """The Hodge star was applied outside its representable domain."""


def _h_product(h1: str, h2: str):
    if h1 == "1":
        return 1, h2
    if h2 == "1":
        return 1, h1
    return _H_TABLE.get((h1, h2), (0, None))


def basis_pairs() -> Iterator[tuple[tuple[int, ...], str]]:
    """All 16 x 6 = 96 (vertical monomial, horizontal element) pairs."""
    for k in range(5):
        for v in combinations(range(4), k):
            for h in HORIZONTAL:
                yield v, h


def _render_basis(v: tuple[int, ...], h: str) -> str:
    vs = "^".join(VERTICAL[i] for i in v)
    if not vs:
        return h
    return vs if h == "1" else f"{vs} @ {h}"


class Form:
    """Homogeneous element of Λ(e0, η1, η2, η3) ⊗ span(HORIZONTAL) with jet coefficients."""

    __slots__ = ("terms", "degree", "space")

    def __init__(self, terms: Mapping | None = None, space: JetSpace = jets.DEFAULT_SPACE):
        clean = {}
        degree = None
        for (v, h), c in (terms or {}).items():
            v = tuple(v)
            if h not in HORIZONTAL_DEGREE:
                raise ValueError(f"unknown horizontal element {h!r}")
            if list(v) != sorted(set(v)) or any(i not in range(4) for i in v):
                raise ValueError(f"bad vertical monomial {v}")
            if not isinstance(c, Jet):
                c = space.const(c)
            if not c:
                continue
            deg = len(v) + HORIZONTAL_DEGREE[h]
            if degree is None:
                degree = deg
            elif deg != degree:
                raise ValueError("heterogeneous sum of forms")
            clean[(v, h)] = c
        self.terms = clean
        self.degree = degree
        self.space = space

    @classmethod
    def basis(cls, v=(), h="1", coeff=1, space: JetSpace = jets.DEFAULT_SPACE) -> Form:
        # unsorted input is reordered with its permutation sign
        v = tuple(v)
        if len(set(v)) != len(v):
            return cls(space=space)
        s = permutation_sign(v)
        c = coeff if isinstance(coeff, Jet) else space.const(coeff)
        return cls({(tuple(sorted(v)), h): s * c}, space=space)

    @classmethod
    def scalar(cls, f, space: JetSpace = jets.DEFAULT_SPACE) -> Form:
        return cls.basis((), "1", f, space=space)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: Form) -> Form:
        if not isinstance(other, Form):
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out[key] + c if key in out else c
        return Form(out, self.space)

    def __neg__(self):
        return Form({k: -c for k, c in self.terms.items()}, self.space)

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def __mul__(self, k):
        if isinstance(k, Form):
            return NotImplemented
        return Form({key: k * c for key, c in self.terms.items()}, self.space)

    __rmul__ = __mul__

    def __xor__(self, other: Form) -> Form:
        return wedge(self, other)

    def coefficient(self, v=(), h="1"):
        return self.terms.get((tuple(v), h), self.space.const(0))

    def map_coefficients(self, fn) -> Form:
        return Form({k: fn(c) for k, c in self.terms.items()}, self.space)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (v, h), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], HORIZONTAL.index(kv[0][1]))):
            cs = str(c)
            basis = _render_basis(v, h)
            if v == () and h == "1":
                parts.append(cs if len(c.numer) == 1 else f"({cs})")
                continue
            if cs == "1":
                parts.append(basis)
            elif cs == "-1":
                parts.append("-" + basis)
            elif c.is_polynomial() and len(c.numer) == 1:
                parts.append(f"{cs} * {basis}")
            else:
                parts.append(f"({cs}) * {basis}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"Form({self})"


def wedge(x: Form, y: Form) -> Form:
    out: dict = {}
    for (v1, h1), c1 in x.terms.items():
        for (v2, h2), c2 in y.terms.items():
            s = merge_sign(v1, v2)
            if not s:
                continue
            k, h = _h_product(h1, h2)
            if not k:
                continue
            key = (tuple(sorted(v1 + v2)), h)
            val = (s * k) * (c1 * c2)
            out[key] = out[key] + val if key in out else val
    return Form(out, x.space)


def _gen(space, v, h, coeff=1):
    return Form.basis(v, h, coeff, space=space)


@lru_cache(maxsize=None)
def _generator_d(space: JetSpace, name: str) -> Form:
    g = lambda v=(), h="1", c=1: _gen(space, v, h, c)  # noqa: E731
    omega1 = g((), "alpha") - g((), "beta")
    table = {
        "e0": Form(space=space),
        "n1": omega1 - g((2, 3), "1", 2),
        "n2": g((), "omega2") - g((3, 1), "1", 2),
        "n3": g((), "omega3") - g((1, 2), "1", 2),
        "alpha": g((3,), "omega2") - g((2,), "omega3"),
        "omega2": g((1,), "omega3", 2) - wedge(g((3,), "1", 2), omega1),
        "omega3": wedge(g((2,), "1", 2), omega1) - g((1,), "omega2", 2),
        "1": Form(space=space),
        "Omega": Form(space=space),
    }
    table["beta"] = -table["alpha"]
    return table[name]


@lru_cache(maxsize=None)
def _basis_d(space: JetSpace, v: tuple[int, ...], h: str) -> Form:
    """d of the coefficient-free basis element ``v ⊗ h``."""
    if not v:
        return _generator_d(space, h)
    first = _gen(space, (v[0],), "1")
    rest = _gen(space, v[1:], h)
    return wedge(_generator_d(space, VERTICAL[v[0]]), rest) - wedge(first, _basis_d(space, v[1:], h))


def d(x: Form) -> Form:
    """Exterior derivative; ``d(f v⊗h) = f' e0 ^ v⊗h + f d(v⊗h)``."""
    space = x.space
    total = Form(space=space)
    e0 = _gen(space, (0,), "1")
    for (v, h), c in x.terms.items():
        dc = jets.t_derivative(c)
        if dc:
            total = total + wedge(e0, _gen(space, v, h, dc))
        db = _basis_d(space, v, h)
        if db:
            total = total + c * db
    return total


def is_basic(x: Form) -> bool:
    """True iff no stored monomial contains η1."""
    return all(1 not in v for v, _ in x.terms)


# -- Hodge star ---------------------------------------------------------------


def _horizontal_expansion(space: JetSpace, h: str) -> EuclidForm:
    A, B, C = (space.var(b) for b in "ABC")
    if h == "1":
        return EuclidForm({(): space.const(1)})
    if h == "alpha":
        return EuclidForm({(4, 5): 2 / B**2})
    if h == "beta":
        return EuclidForm({(6, 7): 2 / C**2})
    if h == "omega2":
        k = 2 / (B * C)
        return EuclidForm({(4, 6): k, (5, 7): k})
    if h == "omega3":
        k = 2 / (B * C)
        return EuclidForm({(4, 7): k, (5, 6): -k})
    if h == "Omega":
        return EuclidForm({(4, 5, 6, 7): 1 / (B**2 * C**2)})
    raise ValueError(h)


def _to_orthonormal(x: Form) -> EuclidForm:
    space = x.space
    A = space.var("A")
    # η2 = e2/A, η3 = e3/A
    vmap = {0: 0, 2: 2, 3: 3}
    out = EuclidForm()
    for (v, h), c in x.terms.items():
        if 1 in v:
            raise StarDomainError("Hodge star needs a basic form (no η1 factor)")
        vmono = tuple(vmap[i] for i in v)
        k = c / A ** sum(1 for i in v if i in (2, 3))
        hor = _horizontal_expansion(space, h)
        # vertical indices are all < 4, so concatenation is already sorted
        out = out + EuclidForm({vmono + hm: k * hc for hm, hc in hor.terms.items()})
    return out


def _from_orthonormal(y: EuclidForm, space: JetSpace) -> Form:
    A, B, C = (space.var(b) for b in "ABC")
    grouped: dict[tuple[int, ...], dict[tuple[int, ...], Jet]] = {}
    for mono, c in y.terms.items():
        vert = tuple(i for i in mono if i < 4)
        hor = tuple(i for i in mono if i >= 4)
        grouped.setdefault(vert, {})[hor] = c
    out = {}
    zero = space.const(0)
    for vert, hparts in grouped.items():
        scale = A ** sum(1 for i in vert if i in (2, 3))
        hparts = dict(hparts)
        pieces = []
        if () in hparts:
            pieces.append(("1", hparts.pop(())))
        if (4, 5) in hparts:
            pieces.append(("alpha", hparts.pop((4, 5)) * B**2 / 2))
        if (6, 7) in hparts:
            pieces.append(("beta", hparts.pop((6, 7)) * C**2 / 2))
        if (4, 6) in hparts or (5, 7) in hparts:
            a, b = hparts.pop((4, 6), zero), hparts.pop((5, 7), zero)
            if a != b:
                raise StarDomainError("result leaves span{omega2}")
            pieces.append(("omega2", a * B * C / 2))
        if (4, 7) in hparts or (5, 6) in hparts:
            a, b = hparts.pop((4, 7), zero), hparts.pop((5, 6), zero)
            if a != -b:
                raise StarDomainError("result leaves span{omega3}")
            pieces.append(("omega3", a * B * C / 2))
        if (4, 5, 6, 7) in hparts:
            pieces.append(("Omega", hparts.pop((4, 5, 6, 7)) * B**2 * C**2))
        if hparts:
            raise StarDomainError(f"horizontal part {sorted(hparts)} is not representable")
        for h, c in pieces:
            out[(vert, h)] = c * scale
    return Form(out, space)


def hodge_star(x: Form) -> Form:
    """Hodge star of a basic form for the cohomogeneity-one metric."""
    if not x.terms:
        return Form(space=x.space)
    return _from_orthonormal(euclid_star(_to_orthonormal(x), 7), x.space)


E0 = Form.basis((0,))
ETA1 = Form.basis((1,))
ETA2 = Form.basis((2,))
ETA3 = Form.basis((3,))
ALPHA = Form.basis((), "alpha")
BETA = Form.basis((), "beta")
OMEGA2 = Form.basis((), "omega2")
OMEGA3 = Form.basis((), "omega3")
OMEGA_VOL = Form.basis((), "Omega")
