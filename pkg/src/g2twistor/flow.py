"""Numerical solution of the first-order G2 flow for the metric functions A, B, C.

The flow is singular at the bolt ``A = 0``, so regular solutions are started
from a truncated power series (``A`` odd with ``A'(0) = -2``, ``B = C`` even)
a short distance ``ε`` away from ``t = 0`` and then integrated with an
adaptive embedded Runge-Kutta pair (Dormand-Prince 8(5,3) from scipy).

The exact B = C solution

    A = -r sqrt(1 - r0^4/r^4),  B = C = sqrt(2) r,  dt = dr / sqrt(1 - r0^4/r^4)

serves as the oracle for the numerics.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, TextIO

import numpy as np
from scipy.integrate import DOP853, quad
from scipy.optimize import brentq

__all__ = [
    "DEFAULT_RTOL",
    "DEFAULT_ATOL",
    "FlowState",
    "SeriesStart",
    "FlowEvent",
    "FlowTrajectory",
    "ClosedFormParams",
    "Comparison",
    "Exploration",
    "SingularStateError",
    "IntegrationError",
    "rhs",
    "series_start",
    "launch_offset",
    "integrate",
    "closed_form",
    "closed_form_t",
    "closed_form_at_t",
    "compare_closed_form",
    "cone_asymptotics",
    "explore_deformation",
]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
BLOWUP_FACTOR = 1e8
MIN_STEP_FACTOR = 1e-14
SERIES_ORDER = 5
SQRT2 = math.sqrt(2.0)


class SingularStateError(ValueError):
    """A state with a vanishing metric coefficient, where the flow is undefined."""


class IntegrationError(RuntimeError):
    """An integration ended in a failure event where success was required."""


@dataclass(frozen=True)
class FlowState:
    t: float
    A: float
    B: float
    C: float

    @property
    def values(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C])

    def swapped(self) -> FlowState:
        return FlowState(self.t, self.A, self.C, self.B)

    def reflected(self) -> FlowState:
        """(t, A, B, C) -> (-t, -A, B, C), a symmetry of the flow."""
        return FlowState(-self.t, -self.A, self.B, self.C)

    def scaled(self, lam: float) -> FlowState:
        return FlowState(lam * self.t, lam * self.A, lam * self.B, lam * self.C)


def rhs(s: FlowState | Sequence[float]) -> tuple[float, float, float]:
    if isinstance(s, FlowState):
        a, b, c = s.A, s.B, s.C
    else:
        a, b, c = s
    if a == 0 or b == 0 or c == 0:
        raise SingularStateError(f"singular state A={a}, B={b}, C={c}")
    a2, b2, c2 = a * a, b * b, c * c
    return (
        (2 * a2 - b2 - c2) / (b * c),
        (b2 - c2 - 2 * a2) / (c * a),
        (c2 - 2 * a2 - b2) / (a * b),
    )


def _rhs_array(t, y):
    a, b, c = y
    with np.errstate(all="ignore"):
        a2, b2, c2 = a * a, b * b, c * c
        return np.array(
            [
                (2 * a2 - b2 - c2) / (b * c),
                (b2 - c2 - 2 * a2) / (c * a),
                (c2 - 2 * a2 - b2) / (a * b),
            ]
        )


# -- singular launch -------------------------------------------------------------


@lru_cache(maxsize=None)
def _unit_series(order: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Exact Taylor coefficients for b0 = 1 of the B = C reduction
    ``B^2 A' = 2A^2 - 2B^2``, ``B B' = -2A`` with ``A(0) = 0, B(0) = 1``."""
    a = [Fraction(0)] * (order + 1)
    b = [Fraction(0)] * (order + 1)
    b[0] = Fraction(1)

    def conv(x, y, n):
        return sum((x[i] * y[n - i] for i in range(n + 1)), Fraction(0))

    for n in range(order):
        s = sum((b[i] * (n - i + 1) * b[n - i + 1] for i in range(1, n + 1)), Fraction(0))
        b[n + 1] = (-2 * a[n] - s) / (n + 1)
        b2 = [conv(b, b, k) for k in range(n + 1)]
        s = sum((b2[i] * (n - i + 1) * a[n - i + 1] for i in range(1, n + 1)), Fraction(0))
        a[n + 1] = (2 * conv(a, a, n) - 2 * b2[n] - s) / (n + 1)
    return tuple(a), tuple(b)


@dataclass(frozen=True)
class SeriesStart:
    """Truncated power series of a regular solution near the bolt t = 0."""

    b0: float
    order: int
    a: tuple[float, ...]
    b: tuple[float, ...]
    c: tuple[float, ...]

    def state(self, t: float) -> FlowState:
        ev = lambda co: float(np.polynomial.polynomial.polyval(t, co))  # noqa: E731
        return FlowState(t, ev(self.a), ev(self.b), ev(self.c))

    def derivative(self, t: float) -> tuple[float, float, float]:
        pd = np.polynomial.polynomial
        return tuple(float(pd.polyval(t, pd.polyder(co))) for co in (self.a, self.b, self.c))


def series_start(b0: float, order: int = SERIES_ORDER, c0: float | None = None) -> SeriesStart:
    if not b0 > 0:
        raise ValueError("b0 must be positive")
    if c0 is not None and c0 != b0:
        raise ValueError(
            "B(0) != C(0): with A(0) = 0 the equations for B' and C' are singular "
            "unless B(0)^2 = C(0)^2, so no regular launch exists"
        )
    if not 1 <= order <= 8:
        raise ValueError("series order must be between 1 and 8")
    ua, ub = _unit_series(order)
    a = tuple(float(x) * b0 ** (1 - k) for k, x in enumerate(ua))
    b = tuple(float(x) * b0 ** (1 - k) for k, x in enumerate(ub))
    return SeriesStart(b0, order, a, b, b)


def launch_offset(b0: float, tol: float = DEFAULT_RTOL, order: int = SERIES_ORDER) -> float:
    return max(1e-3 * b0, tol ** (1.0 / order) * b0)


# -- integration -------------------------------------------------------------------


@dataclass(frozen=True)
class FlowEvent:
    kind: str  # sign-change | blow-up | min-step | reached-t-max
    t: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {"kind": self.kind, "t": self.t, "detail": self.detail}


@dataclass
class FlowTrajectory:
    t: np.ndarray
    y: np.ndarray
    events: list[FlowEvent]
    series: SeriesStart | None = None
    forward: bool = True
    _segments: list = field(default_factory=list, repr=False)

    @property
    def samples(self) -> list[FlowState]:
        return [FlowState(float(t), *map(float, y)) for t, y in zip(self.t, self.y)]

    @property
    def final(self) -> FlowState:
        # the last state in integration order
        i = -1 if self.forward else 0
        return FlowState(float(self.t[i]), *map(float, self.y[i]))

    @property
    def failed(self) -> bool:
        return any(e.kind != "reached-t-max" for e in self.events)

    @property
    def termination(self) -> FlowEvent:
        return self.events[-1]

    def state_at(self, t: float) -> FlowState:
        """Dense-output state; falls back to the launch series before the first sample."""
        lo, hi = float(self.t[0]), float(self.t[-1])
        if self.series is not None and 0 <= t < lo:
            return self.series.state(t)
        if not lo <= t <= hi:
            raise ValueError(f"t = {t} outside the trajectory range [{lo}, {hi}]")
        starts = [s[0] for s in self._segments]
        i = max(0, bisect.bisect_right(starts, t) - 1)
        _, _, interp = self._segments[i]
        return FlowState(t, *map(float, interp(t)))

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "A", "B", "C"])
        for t, y in zip(self.t, self.y):
            w.writerow([f"{v:.17g}" for v in (t, *y)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _check_state(y) -> None:
    if not np.all(np.isfinite(y)):
        raise SingularStateError("non-finite start state")
    if np.any(y == 0):
        raise SingularStateError(f"singular start state {tuple(y)}")


def integrate(
    start: SeriesStart | FlowState,
    t_max: float,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    blowup_factor: float = BLOWUP_FACTOR,
) -> FlowTrajectory:
    """Integrate from ``start`` to ``t_max`` (either direction), stopping at the first event.

    A ``SeriesStart`` is launched at ``t = ε`` from the series.  Samples are
    the accepted steps, returned in increasing ``t``.
    """
    if not 0 < tol < 1 or not atol > 0:
        raise ValueError("tolerances must satisfy 0 < tol < 1 and atol > 0")
    series = None
    if isinstance(start, SeriesStart):
        series = start
        s0 = start.state(launch_offset(start.b0, tol, SERIES_ORDER))
        scale = start.b0
    else:
        s0 = start
        scale = float(np.max(np.abs(s0.values)))
    y0 = s0.values
    _check_state(y0)
    if t_max == s0.t:
        raise ValueError("t_max must differ from the start time")

    blowup = blowup_factor * scale
    min_step = MIN_STEP_FACTOR * max(abs(t_max), abs(t_max - s0.t))
    solver = DOP853(_rhs_array, s0.t, y0, t_bound=t_max, rtol=tol, atol=atol)
    ts, ys, segments, events = [s0.t], [y0.copy()], [], []

    while True:
        t_old, y_old = solver.t, solver.y.copy()
        solver.step()
        if solver.status == "failed":
            events.append(FlowEvent("min-step", float(t_old), _degeneracy(y_old)))
            break
        t_new, y_new = solver.t, solver.y.copy()
        if not np.all(np.isfinite(y_new)) or np.max(np.abs(y_new)) > blowup:
            events.append(FlowEvent("blow-up", float(t_new), f"|state| exceeded {blowup:.3g}"))
            break
        interp = solver.dense_output()
        crossing = _first_crossing(interp, t_old, y_old, t_new, y_new)
        if crossing is not None:
            tc, comp = crossing
            ts.append(tc)
            ys.append(np.asarray(interp(tc), dtype=float))
            segments.append((min(t_old, tc), max(t_old, tc), interp))
            events.append(FlowEvent("sign-change", float(tc), f"{comp} changes sign"))
            break
        ts.append(t_new)
        ys.append(y_new)
        segments.append((min(t_old, t_new), max(t_old, t_new), interp))
        if solver.status == "finished":
            events.append(FlowEvent("reached-t-max", float(t_new)))
            break
        if solver.step_size is not None and solver.step_size < min_step:
            events.append(FlowEvent("min-step", float(t_new), _degeneracy(y_new)))
            break

    t_arr, y_arr = np.array(ts), np.array(ys)
    forward = t_max > s0.t
    if not forward:
        t_arr, y_arr = t_arr[::-1].copy(), y_arr[::-1].copy()
        segments.reverse()
    return FlowTrajectory(t_arr, y_arr, events, series if forward else None, forward, segments)


def _first_crossing(interp, t_old, y_old, t_new, y_new):
    best = None
    for i, name in enumerate("ABC"):
        if np.sign(y_old[i]) * np.sign(y_new[i]) > 0:
            continue
        if y_new[i] == 0:
            tc = t_new
        else:
            tc = brentq(lambda t: interp(t)[i], t_old, t_new, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if best is None or abs(tc - t_old) < abs(best[0] - t_old):
            best = (float(tc), name)
    return best


def _degeneracy(y) -> str:
    mags = ", ".join(f"{n}={v:.3g}" for n, v in zip("ABC", y))
    return f"step size underflow near {mags}"


# -- closed form -----------------------------------------------------------------


@dataclass(frozen=True)
class ClosedFormParams:
    r0: float = 1.0

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError("r0 must be positive")

    @property
    def b0(self) -> float:
        return SQRT2 * self.r0


def closed_form_t(r0: float, r: float) -> float:
    """Geodesic distance ``∫_{r0}^{r} du / sqrt(1 - r0^4/u^4)``.

    With ``u = r0 + s^2`` the endpoint singularity disappears:
    the integrand becomes ``2 u^2 / sqrt((u + r0)(u^2 + r0^2))``.
    """
    if r < r0:
        raise ValueError("r must be at least r0")
    if r == r0:
        return 0.0

    def integrand(s):
        u = r0 + s * s
        return 2 * u * u / math.sqrt((u + r0) * (u * u + r0 * r0))

    val, _ = quad(integrand, 0.0, math.sqrt(r - r0), epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def closed_form(p: ClosedFormParams, r: float) -> FlowState:
    r0 = p.r0
    if r < r0:
        raise ValueError("r must be at least r0")
    a = -r * math.sqrt(1.0 - (r0 / r) ** 4) if r > r0 else 0.0
    return FlowState(closed_form_t(r0, r), a, SQRT2 * r, SQRT2 * r)


def closed_form_at_t(p: ClosedFormParams, t: float) -> FlowState:
    """Closed-form state at geodesic time ``t`` (inverting ``t(r)``)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return closed_form(p, p.r0)
    # the integrand is >= 1, so r - r0 <= t(r)
    r = brentq(lambda r: closed_form_t(p.r0, r) - t, p.r0, p.r0 + t, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    s = closed_form(p, r)
    return FlowState(t, s.A, s.B, s.C)


@dataclass(frozen=True)
class Comparison:
    max_deviation: float
    tol: float
    samples: int
    argmax_r: float

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol

    def as_dict(self) -> dict:
        return {
            "max_deviation": self.max_deviation,
            "tol": self.tol,
            "samples": self.samples,
            "argmax_r": self.argmax_r,
            "ok": self.ok,
        }


def compare_closed_form(
    p: ClosedFormParams,
    r_max: float,
    tol: float = 1e-8,
    rtol: float = DEFAULT_RTOL,
    samples: int = 400,
) -> Comparison:
    """Max deviation in (A, B, C) between the series-launched flow and the closed form on [r0, r_max]."""
    if r_max < p.r0:
        raise ValueError("r_max must be at least r0")
    if r_max == p.r0:
        s = closed_form(p, p.r0)
        launch = series_start(p.b0).state(0.0)
        return Comparison(float(np.max(np.abs(s.values - launch.values))), tol, 1, p.r0)
    traj = integrate(series_start(p.b0), closed_form_t(p.r0, r_max), rtol)
    if traj.failed:
        raise IntegrationError(f"integration failed: {traj.termination}")
    worst, where = 0.0, p.r0
    for r in np.linspace(p.r0, r_max, samples):
        exact = closed_form(p, float(r))
        num = traj.state_at(min(exact.t, float(traj.t[-1])))
        dev = float(np.max(np.abs(num.values - exact.values)))
        if dev > worst:
            worst, where = dev, float(r)
    return Comparison(worst, tol, samples, where)


def cone_asymptotics(traj: FlowTrajectory) -> tuple[float, float, float]:
    """(A/t, B/t, C/t) at the final sample; the cone ray is (-1, √2, √2)."""
    if traj.failed:
        raise IntegrationError(f"trajectory ended in a failure event: {traj.termination}")
    s = traj.final
    return s.A / s.t, s.B / s.t, s.C / s.t


# -- B != C deformations ----------------------------------------------------------


@dataclass
class Exploration:
    delta: float
    classification: str
    event: FlowEvent | None
    forward: FlowTrajectory
    backward: FlowTrajectory

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "classification": self.classification,
            "event": self.event.as_dict() if self.event else None,
        }


BOUNDARY_MISMATCH = 1e-6


def explore_deformation(
    p: ClosedFormParams,
    delta: float,
    t_max: float,
    tol: float = DEFAULT_RTOL,
) -> Exploration:
    """Perturb B -> (1+δ)B, C -> (1-δ)C at the launch point and classify the flow.

    Two legs are integrated from ``t = ε``: forward to ``t_max``, and backward
    toward the bolt (to ``ε/1000``), since the boundary conditions live at
    ``t = 0``.  The classification names the first violated predicate,
    checking the bolt side first: a failure event on either leg, or B and C
    failing to agree at the inner end.
    """
    if not -1 < delta < 1:
        raise ValueError("delta must lie strictly between -1 and 1")
    eps = launch_offset(p.b0, tol)
    if not t_max > eps:
        raise ValueError(f"t_max must exceed the launch offset {eps}")
    s = closed_form_at_t(p, eps)
    start = FlowState(eps, s.A, s.B * (1 + delta), s.C * (1 - delta))
    backward = integrate(start, eps * 1e-3, tol)
    forward = integrate(start, t_max, tol)

    classification, event = "regular-to-t_max", None
    if backward.failed:
        event = backward.termination
        classification = f"bolt-side:{event.kind}"
    elif forward.failed:
        event = forward.termination
        classification = f"forward:{event.kind}"
    else:
        inner = backward.final
        gap = abs(inner.B - inner.C)
        if gap > BOUNDARY_MISMATCH * p.b0:
            event = FlowEvent("boundary-mismatch", inner.t, f"|B - C| = {gap:.3g} near the bolt")
            classification = "bolt-side:boundary-mismatch"
    return Exploration(delta, classification, event, forward, backward)
