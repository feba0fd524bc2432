"""Twistor data for the SU(3) biquotients S_{p1,p2,p3}.

Two pieces: the weights (q1, q2, q3) of the weighted projective plane
CP^2(q1, q2, q3) underlying the twistor space, and a sampled check that the
torus action on SU(3)

    (z, u): A -> diag(z^p1, z^p2, z^p3) A diag(u, u^-1, z^-(p1+p2+p3))

has the same orbits as the T^3 action on U(3)

    (z, u, v): A -> diag(z^-(p2+p3), z^-(p1+p3), z^-(p1+p2)) A diag(u, v, 1)

restricted to SU(3).  Both follow from the scalar identity
``diag(z^p1, z^p2, z^p3) = z^s diag(z^-(p2+p3), z^-(p1+p3), z^-(p1+p2))``
with ``s = p1 + p2 + p3``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import gcd

import numpy as np

__all__ = [
    "BiquotientSpec",
    "TwistorReport",
    "OrbitCheckReport",
    "twistor_weights",
    "random_special_unitary",
    "torus_action",
    "u3_action",
    "verify_orbit_lemma",
    "topology_json",
]

NOTE = (
    "N is in general an orbifold; whether it is a manifold for given p "
    "is not computed here"
)


@dataclass(frozen=True)
class BiquotientSpec:
    p1: int
    p2: int
    p3: int

    def __post_init__(self):
        p = self.p
        if any(not isinstance(x, (int, np.integer)) or isinstance(x, bool) for x in p):
            raise ValueError("p must be integers")
        if any(x <= 0 for x in p):
            raise ValueError("p must be positive")
        for i in range(3):
            for j in range(i + 1, 3):
                if gcd(p[i], p[j]) != 1:
                    raise ValueError(f"p{i + 1}={p[i]} and p{j + 1}={p[j]} are not coprime")

    @property
    def p(self) -> tuple[int, int, int]:
        return (self.p1, self.p2, self.p3)

    @property
    def total(self) -> int:
        return self.p1 + self.p2 + self.p3


@dataclass(frozen=True)
class TwistorReport:
    q1: int
    q2: int
    q3: int
    all_odd: bool
    sum_p: int

    @property
    def q(self) -> tuple[int, int, int]:
        return (self.q1, self.q2, self.q3)


def twistor_weights(spec: BiquotientSpec) -> TwistorReport:
    p = spec.p
    all_odd = all(x % 2 for x in p)
    q = []
    for i in range(3):
        s = p[(i + 1) % 3] + p[(i + 2) % 3]
        q.append(s // 2 if all_odd else s)
    return TwistorReport(q[0], q[1], q[2], all_odd, spec.total)


# -- orbit correspondence ------------------------------------------------------------


def random_special_unitary(rng: np.random.Generator) -> np.ndarray:
    """Gram-Schmidt on complex Gaussian columns, then the determinant phase removed."""
    z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    q = np.zeros_like(z)
    for k in range(3):
        v = z[:, k].copy()
        for j in range(k):
            v -= np.vdot(q[:, j], v) * q[:, j]
        q[:, k] = v / np.linalg.norm(v)
    det = np.linalg.det(q)
    return q * (det.conjugate() / abs(det)) ** (1 / 3)


def torus_action(spec: BiquotientSpec, a: np.ndarray, z: complex, u: complex) -> np.ndarray:
    p1, p2, p3 = spec.p
    left = np.diag([z**p1, z**p2, z**p3])
    right = np.diag([u, 1 / u, z ** (-spec.total)])
    return left @ a @ right


def u3_action(spec: BiquotientSpec, a: np.ndarray, z: complex, u: complex, v: complex) -> np.ndarray:
    p1, p2, p3 = spec.p
    left = np.diag([z ** (-(p2 + p3)), z ** (-(p1 + p3)), z ** (-(p1 + p2))])
    right = np.diag([u, v, 1])
    return left @ a @ right


@dataclass(frozen=True)
class OrbitCheckReport:
    samples: int
    max_forward_distance: float
    max_converse_distance: float
    seed: int
    max_su_defect: float
    excluded: int

    def as_dict(self) -> dict:
        return asdict(self)


def _circle(rng: np.random.Generator) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def _su_defect(m: np.ndarray) -> float:
    unitarity = np.linalg.norm(m.conj().T @ m - np.eye(3))
    return float(max(unitarity, abs(np.linalg.det(m) - 1)))


def verify_orbit_lemma(spec: BiquotientSpec, samples: int, seed: int = 0) -> OrbitCheckReport:
    """Sample SU(3) and circle parameters and measure both directions of the orbit match.

    Forward: the torus image equals the U(3) image with ``u' = z^s u``,
    ``v' = z^s / u``.  Converse: a U(3) parameter triple with ``u v = z^(2s)``
    keeps A in SU(3) and its image is the torus image with ``u~ = z^-s u``.
    One triple per sample with ``u v != z^(2s)`` is also drawn; its image
    must leave SU(3), and it is counted as excluded.
    """
    if not isinstance(samples, (int, np.integer)) or samples < 1:
        raise ValueError("samples must be a positive integer")
    rng = np.random.Generator(np.random.PCG64(seed))
    s = spec.total
    fwd = conv = defect = 0.0
    excluded = 0
    for _ in range(samples):
        a = random_special_unitary(rng)
        z, u = _circle(rng), _circle(rng)
        img = torus_action(spec, a, z, u)
        defect = max(defect, _su_defect(img))
        other = u3_action(spec, a, z, z**s * u, z**s / u)
        fwd = max(fwd, float(np.linalg.norm(img - other)))

        u2 = _circle(rng)
        v2 = z ** (2 * s) / u2
        img2 = u3_action(spec, a, z, u2, v2)
        if abs(np.linalg.det(img2) - 1) > 1e-10:
            raise AssertionError("determinant constraint failed to keep the image in SU(3)")
        match = torus_action(spec, a, z, z ** (-s) * u2)
        conv = max(conv, float(np.linalg.norm(img2 - match)))

        # a triple off the constraint leaves SU(3) and is not counted
        bad_v = v2 * _circle(rng)
        if abs(np.linalg.det(u3_action(spec, a, z, u2, bad_v)) - 1) > 1e-10:
            excluded += 1
    return OrbitCheckReport(samples, fwd, conv, seed, defect, excluded)


def topology_json(spec: BiquotientSpec, orbit: OrbitCheckReport | None = None) -> dict:
    rep = twistor_weights(spec)
    out = {
        "schema_version": 1,
        "p": list(spec.p),
        "q": list(rep.q),
        "all_odd": rep.all_odd,
        "sum_p": rep.sum_p,
        "note": NOTE,
    }
    if orbit is not None:
        out["orbit_check"] = {
            "samples": orbit.samples,
            "max_forward": orbit.max_forward_distance,
            "max_converse": orbit.max_converse_distance,
            "max_su_defect": orbit.max_su_defect,
            "excluded": orbit.excluded,
            "seed": orbit.seed,
        }
    return out
