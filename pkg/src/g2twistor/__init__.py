"""Symbolic and numerical tools for G2-holonomy metrics on R^3-bundles over
twistor spaces of 3-Sasakian 7-manifolds."""

from .exterior import Form, d, hodge_star, is_basic, wedge
from .flow import (
    ClosedFormParams,
    FlowState,
    closed_form,
    compare_closed_form,
    cone_asymptotics,
    explore_deformation,
    integrate,
    series_start,
)
from .g2 import build_psi1, build_psi2, check_equivalence, derive_equations, star_consistency
from .jets import evaluate, normalize, substitute_flow, t_derivative
from .sasakian import BiquotientSpec, twistor_weights, verify_orbit_lemma

__version__ = "0.1.0"

__all__ = [
    "Form",
    "d",
    "hodge_star",
    "is_basic",
    "wedge",
    "ClosedFormParams",
    "FlowState",
    "closed_form",
    "compare_closed_form",
    "cone_asymptotics",
    "explore_deformation",
    "integrate",
    "series_start",
    "build_psi1",
    "build_psi2",
    "check_equivalence",
    "derive_equations",
    "star_consistency",
    "evaluate",
    "normalize",
    "substitute_flow",
    "t_derivative",
    "BiquotientSpec",
    "twistor_weights",
    "verify_orbit_lemma",
]
