"""Acceptance criteria 1-8, each at its stated tolerance and runtime limit.

Every test records one PASS/FAIL line; the lines are printed in the terminal
summary of any pytest run, and directly when this file is run as a script.
"""

import math
import sys
import time

import numpy as np

from g2twistor import exterior, flow, g2, jets, sasakian
from g2twistor.checks import random_basic_form, random_form, basic_pairs

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []

SQRT2 = math.sqrt(2)


def record(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({name}): {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_derivation():
    with Timer() as tm:
        psi1, psi2 = g2.build_psi1(), g2.build_psi2()
        basic = exterior.is_basic(exterior.d(psi1)) and exterior.is_basic(exterior.d(psi2))
        eqs = g2.derive_equations()
        report = g2.check_equivalence(eqs)
    target = jets.flow_rhs()
    bit_identical = report.solved_system is not None and all(
        str(report.solved_system[b]) == str(target[b]) for b in "ABC"
    )
    ok = (
        basic
        and len(eqs) > 0
        and report.forward_ok
        and report.rank == 3
        and bit_identical
        and report.verdict
        and tm.elapsed < 10
    )
    record(1, "derivation", ok,
           f"{len(report.equations)} distinct equations, rank {report.rank}, "
           f"verdict {'EQUIVALENT' if report.verdict else 'NOT_EQUIVALENT'}, {tm.elapsed:.2f}s < 10s")


def test_criterion_2_kernel_soundness():
    import random

    rng = random.Random(0)
    with Timer() as tm:
        pairs = list(exterior.basis_pairs())
        dd_basis = len(pairs) == 96 and all(not exterior.d(exterior.d(exterior.Form.basis(*p))) for p in pairs)
        dd_random = all(not exterior.d(exterior.d(random_form(rng))) for _ in range(100))
        involution = all(
            exterior.hodge_star(exterior.hodge_star(exterior.Form.basis(*p))) == exterior.Form.basis(*p)
            for p in basic_pairs()
        ) and all(
            exterior.hodge_star(exterior.hodge_star(x)) == x
            for x in (random_basic_form(rng, k) for k in range(8) for _ in range(3))
        )
        model = g2.model_identities()
        eps = g2.star_consistency()
        star_ok = abs(eps) == 1 and exterior.hodge_star(g2.build_psi1()) == eps * g2.build_psi2()
    ok = (dd_basis and dd_random and involution and model["psi0_norm"] and model["phi0_norm"]
          and star_ok and tm.elapsed < 30)
    record(2, "kernel soundness", ok,
           f"dd basis {dd_basis}, dd random {dd_random}, involution {involution}, "
           f"model norms {model['psi0_norm'] and model['phi0_norm']}, eps = {eps}, {tm.elapsed:.2f}s < 30s")


def test_criterion_3_closed_form():
    p = flow.ClosedFormParams(1.0)
    with Timer() as tm:
        cmp = flow.compare_closed_form(p, 10.0, tol=1e-8)
        t2 = flow.closed_form_t(1.0, 2.0)
        traj = flow.integrate(flow.series_start(p.b0), 2.0)
        at2 = traj.state_at(t2)
    a_err = abs(at2.A - (-math.sqrt(15) / 2))
    bc_err = max(abs(at2.B - 2 * SQRT2), abs(at2.C - 2 * SQRT2))
    ok = cmp.max_deviation <= 1e-8 and a_err <= 1e-10 and bc_err <= 1e-10 and tm.elapsed < 5
    record(3, "closed form", ok,
           f"max deviation {cmp.max_deviation:.2e} <= 1e-8, |A(2) + sqrt(15)/2| = {a_err:.1e}, "
           f"|B,C(2) - 2 sqrt2| = {bc_err:.1e} <= 1e-10, {tm.elapsed:.2f}s < 5s")


def test_criterion_4_conical_asymptotics():
    p = flow.ClosedFormParams(1.0)
    b0 = p.b0
    cone = np.array([-1.0, SQRT2, SQRT2])
    with Timer() as tm:
        traj = flow.integrate(flow.series_start(b0), 500 * b0)
        devs, oracle = [], []
        for mult in (50, 500):
            t = mult * b0
            s = traj.state_at(t)
            devs.append(float(np.max(np.abs(s.values / t - cone))))
            exact = flow.closed_form_at_t(p, t)
            oracle.append(float(np.max(np.abs(exact.values / t - cone))))
    ok = devs[0] < 2e-2 and devs[1] < 2e-3 and tm.elapsed < 5
    record(4, "conical asymptotics", ok,
           f"t=50 b0: {devs[0]:.2e} < 2e-2 (quadrature {oracle[0]:.2e}), "
           f"t=500 b0: {devs[1]:.2e} < 2e-3 (quadrature {oracle[1]:.2e}), {tm.elapsed:.2f}s < 5s")


def test_criterion_5_exact_ray():
    traj = flow.integrate(flow.FlowState(0.0, -1.0, SQRT2, SQRT2), 1.0)
    s = traj.final
    exact = np.array([-2.0, 2 * SQRT2, 2 * SQRT2])
    rel = float(np.max(np.abs(s.values - exact) / np.abs(exact)))
    ok = not traj.failed and s.t == 1.0 and rel <= 1e-9
    record(5, "exact ray", ok, f"relative deviation at t = 1: {rel:.1e} <= 1e-9")


def _rel(x, y):
    return float(np.max(np.abs(x - y) / np.abs(y)))


def _fd_residuals(traj, relation, times, h):
    out = []
    for t in times:
        fp = relation(traj.state_at(t + h))[0]
        fm = relation(traj.state_at(t - h))[0]
        out.append(abs((fp - fm) / (2 * h) + relation(traj.state_at(t))[1]))
    return max(out)


def test_criterion_6_symmetry_suite():
    s = flow.FlowState(1.0, -0.7, 1.2, 1.9)
    times = np.linspace(1.2, 3.0, 10)
    base = flow.integrate(s, 3.0)
    swapped = flow.integrate(s.swapped(), 3.0)
    reflected = flow.integrate(s.reflected(), -3.0)
    scaled = flow.integrate(s.scaled(2.0), 6.0)
    swap_dev = max(_rel(swapped.state_at(t).swapped().values, base.state_at(t).values) for t in times)
    refl_dev = max(_rel(reflected.state_at(-t).reflected().values, base.state_at(t).values) for t in times)
    scale_dev = max(_rel(scaled.state_at(2 * t).values / 2, base.state_at(t).values) for t in times)

    # (B^2 C^2)' = -8ABC and (A^2 B^2)' = -4ABC along accepted trajectories
    relations = [
        lambda q: (q.B**2 * q.C**2, 8 * q.A * q.B * q.C),
        lambda q: (q.A**2 * q.B**2, 4 * q.A * q.B * q.C),
    ]
    bolt = flow.integrate(flow.series_start(SQRT2), 5.0)
    fd_ok = True
    fd_worst = 0.0
    for traj, ts in ((base, np.linspace(1.5, 2.5, 5)), (bolt, np.linspace(1.0, 4.0, 5))):
        for rel in relations:
            coarse = _fd_residuals(traj, rel, ts, 1e-2)
            fine = _fd_residuals(traj, rel, ts, 5e-3)
            scale = max(abs(rel(traj.state_at(t))[1]) for t in ts)
            # halving h must cut the residual by ~4, and it must be small
            fd_ok &= fine < coarse / 3 and fine < 1e-4 * scale
            fd_worst = max(fd_worst, fine / scale)
    ok = max(swap_dev, refl_dev, scale_dev) <= 1e-9 and fd_ok
    record(6, "symmetry suite", ok,
           f"swap {swap_dev:.1e}, reflection {refl_dev:.1e}, scaling {scale_dev:.1e} <= 1e-9; "
           f"finite-difference residuals O(h^2) {fd_ok} (worst relative {fd_worst:.1e})")


def test_criterion_7_non_regularity():
    p = flow.ClosedFormParams(1.0)
    runs = {dlt: flow.explore_deformation(p, dlt, 1e3) for dlt in (0.0, 0.01, -0.01, 0.1, -0.1)}
    regular = runs[0.0].classification == "regular-to-t_max"
    violated = all(runs[d].classification != "regular-to-t_max" for d in runs if d != 0.0)
    ok = regular and violated
    summary = ", ".join(f"{d:+g}: {ex.classification}" for d, ex in runs.items())
    record(7, "non-regularity", ok, summary)


def test_criterion_8_examples():
    cases = {(1, 1, 1): (1, 1, 1), (1, 2, 3): (5, 4, 3), (1, 3, 5): (4, 3, 2)}
    with Timer() as tm:
        weights_ok = all(
            sasakian.twistor_weights(sasakian.BiquotientSpec(*p)).q == q for p, q in cases.items()
        )
        rep = sasakian.verify_orbit_lemma(sasakian.BiquotientSpec(1, 2, 3), 200, seed=0)
    ok = (weights_ok and rep.max_forward_distance <= 1e-12 and rep.max_converse_distance <= 1e-12
          and tm.elapsed < 5)
    record(8, "examples", ok,
           f"weights {weights_ok}, orbit maxima {rep.max_forward_distance:.1e} / "
           f"{rep.max_converse_distance:.1e} <= 1e-12, {tm.elapsed:.2f}s < 5s")


if __name__ == "__main__":
    failures = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
