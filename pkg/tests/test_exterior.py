import random
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2twistor import exterior
from g2twistor.checks import basic_pairs, random_basic_form, random_form
from g2twistor.euclid import ORIENTATION, EuclidForm, euclid_star, euclid_wedge, volume
from g2twistor.exterior import (
    ALPHA,
    BETA,
    E0,
    ETA1,
    ETA2,
    ETA3,
    HORIZONTAL,
    OMEGA2,
    OMEGA3,
    OMEGA_VOL,
    Form,
    StarDomainError,
    basis_pairs,
    d,
    hodge_star,
    is_basic,
    wedge,
)
from g2twistor.g2 import build_psi1
from g2twistor.jets import var

A, B, C = var("A"), var("B"), var("C")
seeds = st.integers(min_value=0, max_value=2**32 - 1)


# -- horizontal table against an η4..η7 oracle -----------------------------------

# horizontal elements written out in the fiber coframe η4..η7
_ETA_EXPANSION = {
    "1": EuclidForm({(): Fraction(1)}),
    "alpha": EuclidForm.monomial(4, 5, coeff=2),
    "beta": EuclidForm.monomial(6, 7, coeff=2),
    "omega2": EuclidForm.monomial(4, 6, coeff=2) - EuclidForm.monomial(7, 5, coeff=2),
    "omega3": EuclidForm.monomial(4, 7, coeff=2) - EuclidForm.monomial(5, 6, coeff=2),
    "Omega": EuclidForm.monomial(4, 5, 6, 7),
}


@pytest.mark.parametrize("h1", HORIZONTAL)
@pytest.mark.parametrize("h2", HORIZONTAL)
def test_horizontal_products_match_fiber_expansion(h1, h2):
    got = wedge(Form.basis((), h1), Form.basis((), h2))
    expanded = EuclidForm()
    for (v, h), c in got.terms.items():
        assert v == ()
        expanded = expanded + _ETA_EXPANSION[h].scale(Fraction(str(c)))
    assert expanded == euclid_wedge(_ETA_EXPANSION[h1], _ETA_EXPANSION[h2])


def test_alpha_beta():
    assert wedge(ALPHA, BETA) == 4 * OMEGA_VOL


def test_omega2_squared():
    assert wedge(OMEGA2, OMEGA2) == -8 * OMEGA_VOL
    assert wedge(OMEGA3, OMEGA3) == -8 * OMEGA_VOL


def test_omega1_squared():
    omega1 = ALPHA - BETA
    assert wedge(omega1, omega1) == -8 * OMEGA_VOL


def test_one_forms_anticommute():
    assert wedge(ETA2, ETA3) == -wedge(ETA3, ETA2)
    assert not wedge(ETA2, ETA2)


def test_heterogeneous_sum_rejected():
    with pytest.raises(ValueError, match="heterogeneous"):
        E0 + ALPHA


def test_rendering():
    f = Form.basis((0, 2, 3), "1", -(A**2)) + Form.basis((0,), "beta", C**2 / 2)
    assert str(f) == "(C^2/2) * e0 @ beta - A^2 * e0^n2^n3"


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_graded_commutativity(seed):
    rng = random.Random(seed)
    x = random_form(rng, rng.randint(0, 4))
    y = random_form(rng, rng.randint(0, 4))
    if x.degree is None or y.degree is None:
        return
    sign = (-1) ** (x.degree * y.degree)
    assert wedge(x, y) == sign * wedge(y, x)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_associativity(seed):
    rng = random.Random(seed)
    x, y, z = (random_form(rng, rng.randint(0, 3), terms=2) for _ in range(3))
    assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))


# -- exterior derivative --------------------------------------------------------


def test_d_eta2():
    assert d(ETA2) == OMEGA2 - 2 * wedge(ETA3, ETA1)


def test_d_volume_form_of_fiber():
    # Ω = -(1/8) ω1^ω1 and Leibniz: d(ω1^ω1) = 2 dω1^ω1, with ω2^ω1 = ω3^ω1 = 0
    omega1 = ALPHA - BETA
    domega1 = 2 * wedge(ETA3, OMEGA2) - 2 * wedge(ETA2, OMEGA3)
    assert d(omega1) == domega1
    assert not wedge(OMEGA2, omega1) and not wedge(OMEGA3, omega1)
    assert not d(wedge(omega1, omega1))
    assert not d(OMEGA_VOL)


def test_d_e0():
    assert not d(E0)


def test_kahler_form_closed():
    assert not d(ALPHA + BETA)


def test_d_on_coefficients():
    assert d(Form.scalar(A * B)) == Form.basis((0,), "1", var("A", 1) * B + A * var("B", 1))


@pytest.mark.parametrize("pair", list(basis_pairs()), ids=lambda p: f"{p[0]}-{p[1]}")
def test_dd_zero_on_basis(pair):
    v, h = pair
    assert not d(d(Form.basis(v, h)))


def test_basis_pair_count():
    assert len(list(basis_pairs())) == 96


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_dd_zero_on_random_forms(seed):
    assert not d(d(random_form(random.Random(seed))))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_graded_leibniz(seed):
    rng = random.Random(seed)
    x = random_form(rng, rng.randint(0, 3), terms=2)
    y = random_form(rng, rng.randint(0, 3), terms=2)
    if x.degree is None:
        return
    assert d(wedge(x, y)) == wedge(d(x), y) + (-1) ** x.degree * wedge(x, d(y))


def test_is_basic():
    assert not is_basic(wedge(ETA1, ETA2))
    assert is_basic(Form.basis((0, 2, 3)))
    assert is_basic(d(build_psi1()))


# -- Hodge star --------------------------------------------------------------------


def test_star_of_one():
    assert hodge_star(Form.scalar(1)) == Form.basis((0, 2, 3), "Omega", A**2 * B**2 * C**2)


def test_star_of_e0():
    # *e0 = e2^...^e7 = A^2 η2η3 ⊗ B^2 C^2 Ω
    assert hodge_star(E0) == Form.basis((2, 3), "Omega", A**2 * B**2 * C**2)


def test_star_of_alpha():
    # α = (2/B^2) e45, *(e45) = e0 e2 e3 e6 e7 = A^2 (C^2/2) e0η2η3⊗β
    assert hodge_star(ALPHA) == Form.basis((0, 2, 3), "beta", A**2 * C**2 / B**2)


def test_star_requires_basic():
    with pytest.raises(StarDomainError):
        hodge_star(ETA1)


def test_unrepresentable_horizontal_part():
    with pytest.raises(StarDomainError):
        exterior._from_orthonormal(EuclidForm({(4, 6): A}), A.space)


@pytest.mark.parametrize("pair", basic_pairs(), ids=lambda p: f"{p[0]}-{p[1]}")
def test_star_involution_on_basis(pair):
    x = Form.basis(*pair)
    assert hodge_star(hodge_star(x)) == x


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(min_value=0, max_value=7))
def test_star_involution_random(seed, k):
    x = random_basic_form(random.Random(seed), k)
    assert hodge_star(hodge_star(x)) == x


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(min_value=0, max_value=7))
def test_star_pairing_symmetric(seed, k):
    rng = random.Random(seed)
    x, y = random_basic_form(rng, k), random_basic_form(rng, k)
    assert wedge(x, hodge_star(y)) == wedge(y, hodge_star(x))


# -- Euclidean subkernel ------------------------------------------------------------


def _parity_by_cycles(perm):
    seen, sign = set(), 1
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _oracle_star(x: EuclidForm, dim: int) -> EuclidForm:
    """Brute force from e_I ^ *e_J = δ_IJ vol, with cycle-count parity."""
    frame = ORIENTATION[dim]
    out = EuclidForm()
    for mono, c in x.terms.items():
        rest = tuple(g for g in frame if g not in mono)
        perm = [frame.index(g) for g in mono + rest]
        out = out + EuclidForm({rest: _parity_by_cycles(perm) * c})
    return out


def test_euclid_star_example():
    assert euclid_star(EuclidForm.monomial(0, 2, 3), 7) == EuclidForm.monomial(4, 5, 6, 7)


@pytest.mark.parametrize("dim", [7, 8])
def test_euclid_star_matches_oracle_on_all_monomials(dim):
    frame = ORIENTATION[dim]
    for k in range(dim + 1):
        for mono in combinations(frame, k):
            x = EuclidForm({mono: Fraction(1)})
            assert euclid_star(x, dim) == _oracle_star(x, dim)
            # defining property a ^ *a = |a|^2 vol
            assert euclid_wedge(x, euclid_star(x, dim)) == volume(dim)


def test_euclid_star_involution():
    for k in range(8):
        for mono in combinations(ORIENTATION[7], k):
            x = EuclidForm({mono: Fraction(1)})
            assert euclid_star(euclid_star(x, 7), 7) == x
    for mono in combinations(ORIENTATION[8], 4):
        x = EuclidForm({mono: Fraction(1)})
        assert euclid_star(euclid_star(x, 8), 8) == x


def test_monomial_sign_from_order():
    assert EuclidForm.monomial(3, 7, 5) == -EuclidForm.monomial(3, 5, 7)
    assert not EuclidForm.monomial(2, 2)


def test_permutation_oracle_agrees_with_itertools_parity():
    # the cycle-count parity is itself checked against inversion counting
    for perm in permutations(range(5)):
        inv = sum(1 for i in range(5) for j in range(i + 1, 5) if perm[i] > perm[j])
        assert _parity_by_cycles(list(perm)) == (-1) ** inv
