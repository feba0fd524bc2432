"""Constant-coefficient exterior algebra on orthonormal generators e0..e7.

Coefficients only need ring arithmetic and comparison with 0, so the same
code serves exact ``Fraction`` forms and forms with ``Jet`` coefficients
(the latter is how the cone Hodge star is evaluated).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "ORIENTATION",
    "EuclidForm",
    "euclid_wedge",
    "euclid_star",
    "merge_sign",
    "volume",
]

# e1 is absent in dimension 7
ORIENTATION = {
    7: (0, 2, 3, 4, 5, 6, 7),
    8: (0, 1, 2, 3, 4, 5, 6, 7),
}


def merge_sign(left: tuple[int, ...], right: tuple[int, ...]) -> int:
    """Sign of sorting ``left + right``; 0 when they share an index."""
    if set(left) & set(right):
        return 0
    inversions = sum(1 for a in left for b in right if a > b)
    return -1 if inversions % 2 else 1


def permutation_sign(seq: Iterable[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class EuclidForm:
    """Homogeneous form ``sum c_I e^I`` with sorted index tuples ``I``."""

    __slots__ = ("terms", "degree")

    def __init__(self, terms: Mapping[tuple[int, ...], object] | None = None):
        clean = {}
        degree = None
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if list(mono) != sorted(set(mono)):
                raise ValueError(f"monomial {mono} is not strictly increasing")
            if c == 0:
                continue
            if degree is None:
                degree = len(mono)
            elif degree != len(mono):
                raise ValueError("inhomogeneous form")
            clean[mono] = c
        self.terms = clean
        self.degree = degree

    @classmethod
    def monomial(cls, *indices: int, coeff=1) -> EuclidForm:
        sign = permutation_sign(indices)
        if len(set(indices)) != len(indices):
            return cls()
        c = coeff if not isinstance(coeff, int) else Fraction(coeff)
        return cls({tuple(sorted(indices)): sign * c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, EuclidForm):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: EuclidForm) -> EuclidForm:
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out[mono] + c if mono in out else c
        return EuclidForm(out)

    def __neg__(self):
        return EuclidForm({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> EuclidForm:
        return EuclidForm({m: k * c for m, c in self.terms.items()})

    def __rmul__(self, k):
        return self.scale(k)

    def coefficient(self, *indices: int):
        return self.terms.get(tuple(indices), 0)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            name = "e" + "".join(str(i) for i in mono) if mono else "1"
            parts.append(f"({c})*{name}")
        return " + ".join(parts)


def euclid_wedge(x: EuclidForm, y: EuclidForm) -> EuclidForm:
    out: dict[tuple[int, ...], object] = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            s = merge_sign(m1, m2)
            if not s:
                continue
            mono = tuple(sorted(m1 + m2))
            val = c1 * c2 if s > 0 else -(c1 * c2)
            out[mono] = out[mono] + val if mono in out else val
    return EuclidForm(out)


def euclid_star(x: EuclidForm, dim: int) -> EuclidForm:
    """Hodge star for the standard metric, ``a ^ *b = <a, b> vol``."""
    try:
        frame = ORIENTATION[dim]
    except KeyError:
        raise ValueError("dimension must be 7 or 8") from None
    pos = {g: i for i, g in enumerate(frame)}
    out = {}
    for mono, c in x.terms.items():
        if any(g not in pos for g in mono):
            raise ValueError(f"generator outside the dimension-{dim} frame")
        rest = tuple(g for g in frame if g not in mono)
        sign = permutation_sign(pos[g] for g in mono + rest)
        out[rest] = c if sign > 0 else -c
    return EuclidForm(out)


def volume(dim: int, coeff=1) -> EuclidForm:
    return EuclidForm({ORIENTATION[dim]: Fraction(coeff)})
