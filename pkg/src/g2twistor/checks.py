"""Randomized and exhaustive soundness checks for the exterior-calculus kernel."""

from __future__ import annotations

import random

from . import jets
from .exterior import HORIZONTAL_DEGREE, Form, basis_pairs, d, hodge_star, wedge
from .g2 import build_psi1, build_psi2, model_identities, phi0_self_duality, star_consistency
from .jets import Jet, JetSpace

__all__ = [
    "random_jet",
    "random_form",
    "random_basic_form",
    "basic_pairs",
    "run_kernel_checks",
]


def random_jet(rng: random.Random, max_order: int = 1, space: JetSpace = jets.DEFAULT_SPACE) -> Jet:
    """Small random rational function in A, B, C and jets up to ``max_order``."""
    variables = [space.var(b, k) for b in "ABC" for k in range(max_order + 1)]

    def poly(terms: int) -> Jet:
        out = space.const(0)
        for _ in range(terms):
            mono = space.const(rng.randint(-3, 3) or 1)
            for _ in range(rng.randint(0, 2)):
                mono = mono * rng.choice(variables)
            out = out + mono
        return out

    num = poly(rng.randint(1, 3))
    den = poly(rng.randint(1, 2))
    while not den:
        den = poly(1)
    return num / den


def basic_pairs():
    return [(v, h) for v, h in basis_pairs() if 1 not in v]


def _random_homogeneous(rng, pairs, degree, terms, space, max_order):
    pool = [(v, h) for v, h in pairs if len(v) + HORIZONTAL_DEGREE[h] == degree]
    if not pool:
        return Form(space=space)
    chosen = rng.sample(pool, min(terms, len(pool)))
    out = {}
    for key in chosen:
        out[key] = random_jet(rng, max_order, space)
    return Form(out, space)


def random_form(rng: random.Random, degree: int | None = None, terms: int = 3,
                space: JetSpace = jets.DEFAULT_SPACE, max_order: int = 1) -> Form:
    if degree is None:
        degree = rng.randint(0, 8)
    return _random_homogeneous(rng, list(basis_pairs()), degree, terms, space, max_order)


def random_basic_form(rng: random.Random, degree: int | None = None, terms: int = 3,
                      space: JetSpace = jets.DEFAULT_SPACE, max_order: int = 1) -> Form:
    if degree is None:
        degree = rng.randint(0, 7)
    return _random_homogeneous(rng, basic_pairs(), degree, terms, space, max_order)


def run_kernel_checks(seed: int = 0, random_forms: int = 100) -> dict[str, bool]:
    rng = random.Random(seed)
    results: dict[str, bool] = {}

    results["dd_basis_pairs"] = all(not d(d(Form.basis(v, h))) for v, h in basis_pairs())
    results["dd_random_forms"] = all(
        not d(d(random_form(rng))) for _ in range(random_forms)
    )
    results["star_involution_basis"] = all(
        hodge_star(hodge_star(Form.basis(v, h))) == Form.basis(v, h) for v, h in basic_pairs()
    )
    results["star_involution_random"] = all(
        hodge_star(hodge_star(x)) == x
        for x in (random_basic_form(rng, k) for k in range(8) for _ in range(3))
    )
    sym = True
    for k in range(8):
        for _ in range(3):
            x, y = random_basic_form(rng, k), random_basic_form(rng, k)
            sym &= wedge(x, hodge_star(y)) == wedge(y, hodge_star(x))
    results["star_symmetric_pairing"] = sym

    results.update(model_identities())
    results["phi0_self_dual_or_anti"] = phi0_self_duality() in (1, -1)

    eps = star_consistency()
    results["star_consistency"] = abs(eps) == 1 and hodge_star(build_psi1()) == eps * build_psi2()

    alpha, beta = Form.basis((), "alpha"), Form.basis((), "beta")
    results["kahler_closed"] = not d(alpha + beta)
    results["omega1_rule"] = d(alpha - beta) == (
        Form.basis((3,), "omega2", 2) - Form.basis((2,), "omega3", 2)
    )
    return results
