"""Statistics parameter arithmetic, Bessel derivative zeros and closed-form energy bounds.

Everything here is a pure function. Rational input is kept exact
(``fractions.Fraction``) as far as the formula allows; the Bessel-dependent
bounds are necessarily floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

SQRT8_3 = math.sqrt(8.0) / 3.0

Real = Union[int, float, Fraction]


class InvalidInput(ValueError):
    """Raised for malformed or out-of-domain arguments."""


class Singularity(ValueError):
    """Raised when a formula is evaluated on its singular set."""


@dataclass(frozen=True)
class StatisticsParameter:
    """Reduced fraction alpha = mu/nu with nu >= 1."""

    mu: int
    nu: int

    def __post_init__(self):
        if self.nu < 1 or math.gcd(abs(self.mu), self.nu) != 1:
            raise InvalidInput(f"{self.mu}/{self.nu} is not in lowest terms; use reduce()")

    @property
    def value(self) -> Fraction:
        return Fraction(self.mu, self.nu)

    @property
    def odd_numerator(self) -> bool:
        return self.mu % 2 == 1

    @property
    def parity(self) -> str:
        return "odd-numerator" if self.odd_numerator else "even-numerator"

    def __float__(self) -> float:
        return self.mu / self.nu

    def __str__(self) -> str:
        return f"{self.mu}/{self.nu}"

    @classmethod
    def parse(cls, text: str) -> "StatisticsParameter":
        """Parse ``"mu/nu"`` or an integer; floats are refused."""
        s = text.strip()
        num, sep, den = s.partition("/")
        try:
            mu = int(num)
            nu = int(den) if sep else 1
        except ValueError:
            bad = num if not _is_int(num) else den
            pos = s.find(bad) if bad else len(s)
            raise InvalidInput(
                f"cannot parse fraction {text!r}: expected integer/integer, "
                f"bad token {bad!r} at position {pos}"
            ) from None
        return reduce(mu, nu)


def _is_int(s: str) -> bool:
    try:
        int(s)
    except ValueError:
        return False
    return True


def reduce(mu: int, nu: int) -> StatisticsParameter:
    if nu == 0:
        raise InvalidInput("zero denominator")
    g = math.gcd(mu, nu)
    mu, nu = mu // g, nu // g
    if nu < 0:
        mu, nu = -mu, -nu
    return StatisticsParameter(mu, nu)


def as_number(alpha) -> Real:
    """Exact Fraction for rational input, float otherwise."""
    if isinstance(alpha, StatisticsParameter):
        return alpha.value
    if isinstance(alpha, Rational):
        return Fraction(alpha)
    return float(alpha)


def _distance_to_even(t: Real) -> Real:
    r = t % 2
    return min(r, 2 - r)


def alpha_fractionality(alpha, n: int) -> Real:
    """min over p in {0..n-2}, q in Z of |(2p+1) alpha - 2q|.

    Exact for rational alpha. The sequence in p is periodic with period nu
    for alpha = mu/nu, so at most nu values of p are inspected.
    """
    if n < 2:
        raise InvalidInput("alpha_fractionality needs n >= 2")
    a = as_number(alpha)
    p_max = n - 2
    if isinstance(a, Fraction):
        p_max = min(p_max, a.denominator - 1)
    return min(_distance_to_even((2 * p + 1) * a) for p in range(p_max + 1))


def alpha_star(alpha) -> Fraction:
    """Many-body limit: 1/nu for odd numerator, 0 otherwise."""
    if not isinstance(alpha, StatisticsParameter):
        a = as_number(alpha)
        if not isinstance(a, Fraction):
            return Fraction(0)
        alpha = reduce(a.numerator, a.denominator)
    return Fraction(1, alpha.nu) if alpha.odd_numerator else Fraction(0)


# -- Bessel functions --------------------------------------------------------

def _bessel_series(a: float, x: float, derivative: bool) -> float:
    # ascending series; arguments of interest stay below ~5 where it is stable
    if x == 0.0:
        if derivative:
            if a == 1.0:
                return 0.5
            return 0.0 if a > 1.0 else (math.inf if a > 0 else 0.0)
        return 1.0 if a == 0.0 else 0.0
    h = 0.5 * x
    log_h = math.log(h)
    total = 0.0
    k = 0
    while True:
        log_mag = (2 * k + a) * log_h - math.lgamma(k + 1) - math.lgamma(k + a + 1)
        term = math.exp(log_mag)
        if derivative:
            term *= (2 * k + a) / x
        term = -term if k % 2 else term
        total += term
        if k > h * h and abs(term) <= 1e-17 * max(abs(total), 1e-300):
            return total
        k += 1
        if k > 500:
            return total


def bessel_j(a: float, x: float) -> float:
    return _bessel_series(float(a), float(x), derivative=False)


def bessel_j_prime(a: float, x: float) -> float:
    return _bessel_series(float(a), float(x), derivative=True)


def bessel_deriv_first_zero(a: float) -> float:
    """First positive zero j'_a of the derivative of J_a; j'_0 := 0."""
    a = float(a)
    if not math.isfinite(a) or a < 0:
        raise InvalidInput(f"order must be finite and non-negative, got {a}")
    if a == 0.0:
        return 0.0
    lo, hi = math.sqrt(2 * a), math.sqrt(2 * a * (1 + a))
    f_lo, f_hi = bessel_j_prime(a, lo), bessel_j_prime(a, hi)
    # J'_a > 0 before the first zero; widen outwards until the sign flips
    while f_lo <= 0.0:
        lo *= 0.5
        f_lo = bessel_j_prime(a, lo)
    while f_hi > 0.0:
        hi *= 1.25
        f_hi = bessel_j_prime(a, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if bessel_j_prime(a, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- closed-form bounds -------------------------------------------------------

@dataclass(frozen=True)
class BoundInputs:
    omega: float = 1.0
    mass: float = 1.0
    n_particles: int = 1
    angular_momentum: Optional[int] = None
    density: Optional[float] = None
    flux_radius: Optional[float] = None

    def __post_init__(self):
        if self.omega < 0 or self.mass <= 0 or self.n_particles < 1:
            raise InvalidInput("need omega >= 0, mass > 0, n_particles >= 1")
        if self.flux_radius is not None and self.flux_radius < 0:
            raise InvalidInput("flux_radius must be >= 0")
        if self.density is not None and self.density < 0:
            raise InvalidInput("density must be >= 0")

    @property
    def filling(self) -> Optional[float]:
        if self.density is None or self.flux_radius is None:
            return None
        return self.flux_radius * math.sqrt(self.density)


@dataclass(frozen=True)
class BoundConstants:
    """Reporting conventions for constants that are only bracketed.

    ``c1`` defaults to the largest admissible value sqrt(8)/(3 j'_1) and
    ``c2`` to the smallest admissible value sqrt(8)/3.
    """

    c1: Optional[float] = None
    c2: float = SQRT8_3

    @property
    def lower(self) -> float:
        return SQRT8_3 / bessel_deriv_first_zero(1.0) if self.c1 is None else self.c1


def harmonic_lower_bound(alpha, inputs: BoundInputs, constants: BoundConstants = BoundConstants()) -> float:
    # a single particle has no exchange; fall back to the periodized alpha_2
    a_n = alpha_fractionality(alpha, max(inputs.n_particles, 2))
    return constants.lower * bessel_deriv_first_zero(float(a_n)) * inputs.omega * inputs.n_particles ** 1.5


def harmonic_upper_bound(inputs: BoundInputs, constants: BoundConstants = BoundConstants()) -> float:
    return constants.c2 * inputs.omega * inputs.n_particles ** 1.5


def cs_bound(alpha, inputs: BoundInputs) -> Real:
    """omega (N + |L + alpha N(N-1)/2|); exact for rational alpha and omega."""
    if inputs.angular_momentum is None:
        raise InvalidInput("cs_bound needs the angular momentum L")
    n = inputs.n_particles
    a = as_number(alpha)
    omega = Fraction(inputs.omega) if isinstance(a, Fraction) and float(inputs.omega).is_integer() else inputs.omega
    return omega * (n + abs(inputs.angular_momentum + a * Fraction(n * (n - 1), 2)))


def cs_optimal_angular_momentum(alpha, n: int) -> int:
    a = as_number(alpha)
    return round(-a * Fraction(n * (n - 1), 2)) if isinstance(a, Fraction) else round(-a * n * (n - 1) / 2)


def average_field_energy(alpha, inputs: BoundInputs, periodized: bool = False) -> float:
    a = alpha_fractionality(alpha, 2) if periodized else abs(as_number(alpha))
    return SQRT8_3 * math.sqrt(float(a)) * inputs.omega * inputs.n_particles ** 1.5


def statistical_repulsion(r: float, alpha, p: int, q: int) -> Real:
    if r == 0:
        raise Singularity("statistical repulsion is singular at r = 0")
    if p < 0:
        raise InvalidInput("p must be >= 0")
    return abs((2 * p + 1) * as_number(alpha) - 2 * q) ** 2 / r ** 2


def repulsion_lower_bound(r: float, alpha, n: int) -> Real:
    """alpha_N^2 / r^2, the bound over all windings for n particles."""
    if r == 0:
        raise Singularity("statistical repulsion is singular at r = 0")
    return alpha_fractionality(alpha, n) ** 2 / r ** 2


@dataclass(frozen=True)
class GasAsymptotics:
    dilute: Optional[float]
    dense: float
    regime: str
    flagged: bool = False


def gas_bound_asymptotics(alpha, filling: float) -> GasAsymptotics:
    """The two regime values of the gas energy coefficient e(alpha, gamma).

    Never interpolates. At gamma = 1 the dilute branch is undefined and
    only the dense value is returned, flagged.
    """
    if not filling > 0:
        raise InvalidInput("filling ratio must be > 0")
    dense = 2 * math.pi * abs(float(as_number(alpha)))
    if filling == 1.0:
        return GasAsymptotics(None, dense, "dense", flagged=True)
    js = bessel_deriv_first_zero(float(alpha_star(alpha)))
    dilute = 2 * math.pi / abs(math.log(filling)) + math.pi * js ** 2
    return GasAsymptotics(dilute, dense, "dilute" if filling < 1 else "dense")
