"""The torsion-free G2 condition for the cohomogeneity-one ansatz.

Builds the model forms on R^7 / R^8, the G2 3-form ``psi1`` and its dual
4-form ``psi2`` on the cone, extracts the polynomial relations forced by
``d psi1 = d psi2 = 0``, and checks exactly that they are equivalent to the
first-order flow

    A' = (2A^2 - B^2 - C^2)/(BC),
    B' = (B^2 - C^2 - 2A^2)/(CA),
    C' = (C^2 - 2A^2 - B^2)/(AB)

wherever A, B, C are nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import jets
from .euclid import EuclidForm, euclid_star, euclid_wedge, volume
from .exterior import VERTICAL, Form, d, hodge_star, is_basic, wedge
from .jets import Jet, JetSpace, JetVariable

__all__ = [
    "EquationRecord",
    "G2EquationSet",
    "EquivalenceReport",
    "DerivationError",
    "build_psi0",
    "build_phi0",
    "build_psi1",
    "build_psi2",
    "derive_equations",
    "check_equivalence",
    "star_consistency",
    "equivalence_json",
    "phi0_self_duality",
    "model_identities",
]

PRIMES = ("A", "B", "C")


class DerivationError(RuntimeError):
    """The symbolic derivation produced something structurally impossible."""


# -- model forms ---------------------------------------------------------------


def build_psi0() -> EuclidForm:
    m = EuclidForm.monomial
    return (
        m(0, 2, 3, coeff=-1)
        + m(0, 4, 5, coeff=-1)
        + m(0, 6, 7)
        + m(3, 4, 6)
        + m(3, 7, 5, coeff=-1)
        + m(2, 4, 7, coeff=-1)
        + m(2, 5, 6)
    )


def build_phi0() -> EuclidForm:
    psi0 = build_psi0()
    return euclid_wedge(EuclidForm.monomial(1), psi0) - euclid_star(psi0, 7)


# -- cone forms ------------------------------------------------------------------


def build_psi1(space: JetSpace = jets.DEFAULT_SPACE) -> Form:
    A, B, C = (space.var(b) for b in "ABC")
    g = lambda v, h, c: Form.basis(v, h, c, space=space)  # noqa: E731
    return (
        g((0, 2, 3), "1", -(A**2))
        + g((0,), "alpha", -(B**2) / 2)
        + g((0,), "beta", C**2 / 2)
        + g((3,), "omega2", A * B * C / 2)
        + g((2,), "omega3", -(A * B * C) / 2)
    )


def build_psi2(space: JetSpace = jets.DEFAULT_SPACE) -> Form:
    A, B, C = (space.var(b) for b in "ABC")
    g = lambda v, h, c: Form.basis(v, h, c, space=space)  # noqa: E731
    return (
        g((), "Omega", B**2 * C**2)
        + g((2, 3), "alpha", -(A**2) * B**2 / 2)
        + g((2, 3), "beta", A**2 * C**2 / 2)
        + g((0, 2), "omega2", A * B * C / 2)
        + g((0, 3), "omega3", A * B * C / 2)
    )


# -- equations -------------------------------------------------------------------


@dataclass(frozen=True)
class EquationRecord:
    source: str
    coefficient: Jet
    equation: Jet


@dataclass(frozen=True)
class G2EquationSet:
    records: tuple[EquationRecord, ...]

    def distinct(self) -> list[tuple[Jet, tuple[str, ...]]]:
        """Unique normalized equations in first-seen order, with all their sources."""
        seen: dict[Jet, list[str]] = {}
        for r in self.records:
            seen.setdefault(r.equation, []).append(r.source)
        return [(eq, tuple(src)) for eq, src in seen.items()]

    def __len__(self):
        return len(self.records)


def _source_name(form_name: str, v: tuple[int, ...], h: str) -> str:
    vs = "^".join(VERTICAL[i] for i in v) or "1"
    return f"{form_name}/{vs}@{h}"


def _normalize_equation(c: Jet) -> Jet:
    """Numerator made primitive, stripped of powers of A, B, C, positive leading coefficient."""
    space = c.space
    p = c.numer
    _, p = p.primitive()
    # only the nonvanishing order-0 factors may be dropped
    common = [
        min(m[i] for m in p.monoms()) if v.order == 0 else 0
        for i, v in enumerate(space.variables)
    ]
    if any(common):
        p = p.quo_term((tuple(common), space.ring.domain.one))
    if p.LC < 0:
        p = -p
    return space.normalize(p)


def derive_equations(space: JetSpace = jets.DEFAULT_SPACE) -> G2EquationSet:
    records = []
    for name, form in (("dPsi1", build_psi1(space)), ("dPsi2", build_psi2(space))):
        dform = d(form)
        if not is_basic(dform):
            raise DerivationError(f"{name} retains η1 terms; the rule set is inconsistent")
        for (v, h), c in dform.terms.items():
            records.append(EquationRecord(_source_name(name, v, h), c, _normalize_equation(c)))
    if not records:
        raise DerivationError("no equations extracted")
    for r in records:
        _linear_parts(r.equation)
    return G2EquationSet(tuple(records))


def _linear_parts(eq: Jet) -> tuple[list[Jet], Jet]:
    """Split ``eq = sum_X c_X X' + c_0`` with coefficients free of primes."""
    space = eq.space
    degs = eq.degrees()
    for v, k in degs.items():
        if v.order > 1:
            raise DerivationError(f"equation {eq} involves {v}")
    primes = [space.var(b, 1) for b in PRIMES]
    idx = [space.index(JetVariable(b, 1)) for b in PRIMES]
    for monom in eq.numer.monoms():
        if sum(monom[i] for i in idx) > 1:
            raise DerivationError(f"equation {eq} is not linear in the primes")
    coeffs = [
        space.normalize(eq.numer.diff(space.ring.gens[i]), eq.denom) for i in idx
    ]
    rest = eq
    for c, p in zip(coeffs, primes):
        rest = rest - c * p
    return coeffs, rest


# -- exact linear algebra over the jet field ---------------------------------------


def _row_reduce(rows: list[list[Jet]], ncols: int):
    """Gauss-Jordan on augmented rows; returns (reduced rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return rows, pivots


def _solve(equations: list[Jet]):
    """Return (rank, consistent, solution or None) for the primes."""
    rows = []
    for eq in equations:
        coeffs, rest = _linear_parts(eq)
        rows.append(coeffs + [-rest])
    reduced, pivots = _row_reduce(rows, 3)
    rank = len(pivots)
    consistent = all(not row[3] for row in reduced[rank:])
    solution = None
    if rank == 3 and consistent:
        solution = {b: reduced[i][3] for i, b in enumerate(PRIMES)}
    return rank, consistent, solution


@dataclass
class EquivalenceReport:
    equations: list[tuple[Jet, tuple[str, ...]]]
    forward_residuals: list[Jet]
    solved_system: dict[str, Jet] | None
    rank: int
    consistent: bool
    redundancy_ok: bool
    star_sign: int
    matches_flow: bool = field(default=False)

    @property
    def forward_ok(self) -> bool:
        return all(not r for r in self.forward_residuals)

    @property
    def verdict(self) -> bool:
        return self.forward_ok and self.rank == 3 and self.consistent and self.matches_flow and self.redundancy_ok


def check_equivalence(eqs: G2EquationSet, star_sign: int | None = None) -> EquivalenceReport:
    distinct = eqs.distinct()
    polys = [eq for eq, _ in distinct]
    space = polys[0].space
    forward = [jets.substitute_flow(eq) for eq in polys]
    rank, consistent, solution = _solve(polys)
    if rank < 3:
        raise DerivationError(f"underdetermined: rank {rank} < 3")
    if not consistent:
        raise DerivationError("inconsistent linear system in the primes")
    target = jets.flow_rhs(space)
    matches = solution is not None and all(solution[b] == target[b] for b in PRIMES)
    # every equation must be implied by the others: dropping it keeps the same solution
    redundancy_ok = True
    if len(polys) > 3:
        for i in range(len(polys)):
            r, ok, sol = _solve(polys[:i] + polys[i + 1:])
            if r != 3 or not ok or sol != solution:
                redundancy_ok = False
    if star_sign is None:
        star_sign = star_consistency(space)
    return EquivalenceReport(
        equations=distinct,
        forward_residuals=forward,
        solved_system=solution,
        rank=rank,
        consistent=consistent,
        redundancy_ok=redundancy_ok,
        star_sign=star_sign,
        matches_flow=matches,
    )


def star_consistency(space: JetSpace = jets.DEFAULT_SPACE) -> int:
    """Sign ε with ``*psi1 = ε psi2`` under the fixed orientation."""
    psi1, psi2 = build_psi1(space), build_psi2(space)
    star = hodge_star(psi1)
    if star == psi2:
        eps = 1
    elif star == -psi2:
        eps = -1
    else:
        raise DerivationError("*psi1 is not proportional to psi2")
    A, B, C = (space.var(b) for b in "ABC")
    vol = Form.basis((0, 2, 3), "Omega", 7 * eps * A**2 * B**2 * C**2, space=space)
    if wedge(psi1, psi2) != vol:
        raise DerivationError("psi1 ^ psi2 is not 7ε times the volume form")
    return eps


def phi0_self_duality() -> int:
    """σ with ``*phi0 = σ phi0`` in dimension 8."""
    phi0 = build_phi0()
    star = euclid_star(phi0, 8)
    if star == phi0:
        return 1
    if star == -phi0:
        return -1
    raise DerivationError("phi0 is neither self-dual nor anti-self-dual")


def equivalence_json(report: EquivalenceReport) -> dict:
    return {
        "schema_version": 1,
        "equations": [
            {"source": src[0], "sources": list(src), "poly": str(eq)}
            for eq, src in report.equations
        ],
        "forward_residuals_zero": report.forward_ok,
        "solved": {
            f"{b}prime": (str(report.solved_system[b]) if report.solved_system else None)
            for b in PRIMES
        },
        "rank": report.rank,
        "redundancy_ok": report.redundancy_ok,
        "star_sign": report.star_sign,
        "verdict": "EQUIVALENT" if report.verdict else "NOT_EQUIVALENT",
    }


def model_identities() -> dict[str, bool]:
    """Ψ0 ^ *Ψ0 = 7 vol7 and Φ0 ^ *Φ0 = 14 vol8, exactly."""
    psi0, phi0 = build_psi0(), build_phi0()
    return {
        "psi0_norm": euclid_wedge(psi0, euclid_star(psi0, 7)) == volume(7, 7),
        "phi0_norm": euclid_wedge(phi0, euclid_star(phi0, 8)) == volume(8, 14),
        "phi0_degree": phi0.degree == 4,
        "psi0_coefficient": psi0.coefficient(0, 2, 3) == Fraction(-1),
    }
