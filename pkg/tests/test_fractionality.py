import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from scipy import special

from anyonvmc.fractionality import (
    BoundConstants,
    BoundInputs,
    InvalidInput,
    Singularity,
    StatisticsParameter,
    alpha_fractionality,
    alpha_star,
    average_field_energy,
    bessel_deriv_first_zero,
    bessel_j_prime,
    cs_bound,
    gas_bound_asymptotics,
    harmonic_lower_bound,
    reduce,
    statistical_repulsion,
)

SQRT8_3 = math.sqrt(8) / 3


@pytest.mark.parametrize("mu,nu,out", [(2, 4, (1, 2)), (2, 3, (2, 3)), (-4, 6, (-2, 3)), (3, -6, (-1, 2)), (0, 5, (0, 1))])
def test_reduce(mu, nu, out):
    a = reduce(mu, nu)
    assert (a.mu, a.nu) == out


def test_reduce_zero_denominator():
    with pytest.raises(InvalidInput):
        reduce(1, 0)


def test_parse_reports_position():
    with pytest.raises(InvalidInput, match="position 2"):
        StatisticsParameter.parse("2/x")
    with pytest.raises(InvalidInput):
        StatisticsParameter.parse("0.5")
    assert StatisticsParameter.parse(" 4/6 ") == reduce(2, 3)


def test_parity_classification():
    assert reduce(0, 1).parity == "even-numerator"
    assert reduce(1, 3).parity == "odd-numerator"
    assert reduce(2, 3).parity == "even-numerator"


@given(st.integers(-50, 50), st.integers(1, 50))
def test_reduce_lowest_terms(mu, nu):
    a = reduce(mu, nu)
    assert math.gcd(abs(a.mu), a.nu) == 1 and a.nu >= 1
    assert a.value == Fraction(mu, nu)


@pytest.mark.parametrize("alpha,n,out", [(Fraction(2, 3), 2, Fraction(2, 3)), (Fraction(2, 3), 3, 0), (Fraction(1, 3), 10, Fraction(1, 3))])
def test_alpha_fractionality_examples(alpha, n, out):
    assert alpha_fractionality(alpha, n) == out


def _brute(alpha, n):
    return min(abs((2 * p + 1) * alpha - 2 * q) for p in range(n - 1) for q in range(-3 * n, 3 * n + 1))


@given(st.integers(-12, 12), st.integers(1, 9), st.integers(2, 14))
def test_alpha_fractionality_matches_brute_force(mu, nu, n):
    a = Fraction(mu, nu)
    assert alpha_fractionality(a, n) == _brute(a, n)


@given(st.integers(-12, 12), st.integers(1, 9), st.integers(2, 14))
def test_alpha_fractionality_is_even_periodic(mu, nu, n):
    a = Fraction(mu, nu)
    assert alpha_fractionality(a, n) == alpha_fractionality(a + 2, n) == alpha_fractionality(-a, n)


@given(st.integers(0, 12), st.integers(1, 9))
def test_alpha_n_converges_to_alpha_star(mu, nu):
    a = Fraction(mu, nu)
    assert alpha_fractionality(a, 2 * nu + 2) == alpha_star(a)


def test_alpha_fractionality_needs_two_particles():
    with pytest.raises(InvalidInput):
        alpha_fractionality(Fraction(1, 3), 1)


@pytest.mark.parametrize("alpha,out", [(Fraction(1, 3), Fraction(1, 3)), (Fraction(2, 3), 0), (Fraction(1), 1), (Fraction(0), 0)])
def test_alpha_star(alpha, out):
    assert alpha_star(alpha) == out


def test_bessel_zero_examples():
    assert bessel_deriv_first_zero(0.0) == 0.0
    assert abs(bessel_deriv_first_zero(1.0) - 1.84118) < 1e-4
    j = bessel_deriv_first_zero(0.5)
    assert 1.0 <= j <= math.sqrt(1.5)


@given(st.floats(0.01, 3.0))
def test_bessel_zero_brackets_and_root(a):
    j = bessel_deriv_first_zero(a)
    assert math.sqrt(2 * a) <= j <= math.sqrt(2 * a * (1 + a))
    assert abs(bessel_j_prime(a, j)) < 1e-10


@given(st.floats(0.05, 3.0), st.floats(0.1, 5.0))
def test_bessel_derivative_against_scipy(a, x):
    assert abs(bessel_j_prime(a, x) - special.jvp(a, x)) < 1e-10


def test_bessel_zero_against_scipy_root():
    from scipy.optimize import brentq

    for a in (0.2, 0.5, 1.0, 2.0, 3.0):
        ref = brentq(lambda x: special.jvp(a, x), 1e-3 + math.sqrt(2 * a) * 0.999, math.sqrt(2 * a * (1 + a)) * 1.001)
        assert abs(bessel_deriv_first_zero(a) - ref) < 1e-9


def test_harmonic_lower_bound_examples():
    assert harmonic_lower_bound(Fraction(0), BoundInputs(n_particles=7)) == 0
    assert abs(harmonic_lower_bound(Fraction(1), BoundInputs(n_particles=1)) - SQRT8_3) < 1e-12
    assert harmonic_lower_bound(Fraction(2, 3), BoundInputs(n_particles=3)) == 0


def test_default_constants_are_admissible():
    c = BoundConstants()
    assert c.lower <= SQRT8_3 / bessel_deriv_first_zero(1.0) + 1e-15
    assert c.c2 >= SQRT8_3


@pytest.mark.parametrize(
    "alpha,n,l,out",
    [(Fraction(0), 5, 0, 5), (Fraction(2, 3), 6, -6, 10), (Fraction(2, 3), 6, -10, 6)],
)
def test_cs_bound_examples(alpha, n, l, out):
    val = cs_bound(alpha, BoundInputs(n_particles=n, angular_momentum=l))
    assert val == out and isinstance(val, Fraction)


def test_cs_bound_needs_l():
    with pytest.raises(InvalidInput):
        cs_bound(Fraction(1, 3), BoundInputs(n_particles=3))


def test_average_field_examples():
    assert average_field_energy(Fraction(0), BoundInputs(n_particles=4)) == 0
    assert abs(average_field_energy(Fraction(1), BoundInputs(n_particles=4)) - 8 * SQRT8_3) < 1e-12
    assert abs(average_field_energy(Fraction(1, 4), BoundInputs(n_particles=1)) - 0.5 * SQRT8_3) < 1e-12


def test_statistical_repulsion_examples():
    assert statistical_repulsion(1.0, Fraction(1), 0, 0) == 1
    assert statistical_repulsion(2.0, Fraction(2, 3), 1, 1) == 0
    assert statistical_repulsion(1.0, Fraction(1, 3), 1, 1) == 1
    with pytest.raises(Singularity):
        statistical_repulsion(0.0, Fraction(1, 3), 0, 0)


def test_gas_asymptotics_examples():
    g = gas_bound_asymptotics(Fraction(1), 2.0)
    assert abs(g.dense - 2 * math.pi) < 1e-12 and g.regime == "dense"
    g = gas_bound_asymptotics(Fraction(2, 3), 1e-3)
    assert abs(g.dilute - 2 * math.pi / abs(math.log(1e-3))) < 1e-12
    g = gas_bound_asymptotics(Fraction(1, 3), math.exp(-2 * math.pi))
    assert abs(g.dilute - (1 + math.pi * bessel_deriv_first_zero(1 / 3) ** 2)) < 1e-12
    g = gas_bound_asymptotics(Fraction(1, 3), 1.0)
    assert g.dilute is None and g.flagged


def test_bound_inputs_filling():
    inp = BoundInputs(n_particles=4, density=4.0, flux_radius=0.25)
    assert inp.filling == pytest.approx(0.5)
