"""Trial wavefunctions psi_alpha for even and odd numerators.

Even numerator mu (alpha = mu/nu):

    psi = J(z) * f_N(conj z) * prod_l phi_0(x_l)

Odd numerator:

    psi = J(z) * norm * sum_colorings prod_q [ prod_{j<k in q} conj(z_jk)^mu * Slater_K(x_q) ]

J is the Jastrow factor prod |z_jk|^-alpha, or exp(-alpha sum w_R) for
extended anyons. All evaluators act on complex position arrays of shape
``(..., N)`` and return complex logarithms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .basis import OneBodyBasis, magic_numbers, slater_log
from .clustering import ClusterPolySpec, coloring_table, cluster_poly_log, pair_logs, subset_edge_logs, coloring_sum
from .fractionality import StatisticsParameter, Singularity, reduce
from .logcomplex import LogComplex


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class Setting:
    """Trap (mass, omega) or square box [0, box_side]^2; flux_radius > 0 makes anyons extended."""

    kind: str = "trap"
    mass: float = 1.0
    omega: float = 1.0
    box_side: float = 1.0
    flux_radius: float = 0.0

    def __post_init__(self):
        if self.kind not in ("trap", "box"):
            raise InvalidSpec(f"setting must be 'trap' or 'box', not {self.kind!r}")
        if self.mass <= 0 or self.flux_radius < 0:
            raise InvalidSpec("need mass > 0 and flux_radius >= 0")
        if self.kind == "trap" and self.omega < 0:
            raise InvalidSpec("omega must be >= 0")
        if self.kind == "box" and self.box_side <= 0:
            raise InvalidSpec("box_side must be > 0")

    @property
    def extended(self) -> bool:
        return self.flux_radius > 0

    @property
    def trap_omega(self) -> float:
        return self.omega if self.kind == "trap" else 0.0


@dataclass(frozen=True)
class TrialStateSpec:
    alpha: StatisticsParameter
    n_particles: int
    setting: Setting = field(default_factory=Setting)
    basis_kind: Optional[str] = None  # odd branch only
    branch: Optional[str] = None
    strict_magic: bool = False

    def __post_init__(self):
        alpha = self.alpha
        if not isinstance(alpha, StatisticsParameter):
            alpha = StatisticsParameter.parse(alpha) if isinstance(alpha, str) else reduce(Fraction(alpha).numerator, Fraction(alpha).denominator)
            object.__setattr__(self, "alpha", alpha)
        natural = "odd" if alpha.odd_numerator else "even"
        if self.branch is None:
            object.__setattr__(self, "branch", natural)
        elif self.branch != natural:
            raise InvalidSpec(
                f"branch {self.branch!r} needs a {self.branch} numerator, but alpha = {alpha} has mu = {alpha.mu}"
            )
        if alpha.mu < 0:
            raise InvalidSpec("negative alpha is not supported; use the conjugate state")
        if self.n_particles < 1 or self.n_particles % alpha.nu:
            raise InvalidSpec(f"N = {self.n_particles} must be a positive multiple of nu = {alpha.nu}")
        if self.branch == "odd":
            kind = self.basis_kind or ("neumann-box" if self.setting.kind == "box" else "oscillator")
            object.__setattr__(self, "basis_kind", kind)
            if self.strict_magic and kind == "oscillator" and self.k not in magic_numbers(self.k)[0]:
                raise InvalidSpec(f"K = {self.k} does not fill oscillator shells")

    @property
    def mu(self) -> int:
        return self.alpha.mu

    @property
    def nu(self) -> int:
        return self.alpha.nu

    @property
    def k(self) -> int:
        return self.n_particles // self.alpha.nu

    @property
    def alpha_value(self) -> float:
        return float(self.alpha)

    @property
    def cluster_spec(self) -> ClusterPolySpec:
        return ClusterPolySpec(self.mu, self.nu, self.k)

    @property
    def basis(self) -> OneBodyBasis:
        s = self.setting
        kind = self.basis_kind or ("neumann-box" if s.kind == "box" else "oscillator")
        if kind == "neumann-box":
            return OneBodyBasis(kind, s.mass, 1.0, s.box_side)
        return OneBodyBasis(kind, s.mass, s.omega)


@dataclass(frozen=True)
class Configuration:
    positions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=complex))

    @property
    def n(self) -> int:
        return self.positions.shape[-1]

    @property
    def pair_distances(self) -> np.ndarray:
        z = self.positions
        iu, ju = np.triu_indices(self.n, 1)
        return np.abs(z[..., iu] - z[..., ju])

    @property
    def min_pair_distance(self) -> np.ndarray:
        d = self.pair_distances
        return np.min(d, axis=-1) if d.shape[-1] else np.full(d.shape[:-1], np.inf)

    def require_off_diagonal(self) -> "Configuration":
        if np.any(self.min_pair_distance <= 0):
            raise Singularity("configuration lies on the diagonal set")
        return self


def w_radius(r, radius: float):
    """w_R as a function of |x|: ln r outside the disk, ln R + (r^2/R^2 - 1)/2 inside."""
    r = np.asarray(r, dtype=float)
    if radius <= 0:
        with np.errstate(divide="ignore"):
            return np.log(r)
    inside = r <= radius
    with np.errstate(divide="ignore"):
        outer = np.log(np.where(inside, radius, r))
    return np.where(inside, math.log(radius) + 0.5 * (r * r / radius ** 2 - 1.0), outer)


def pair_distances(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    iu, ju = np.triu_indices(z.shape[-1], 1)
    return np.abs(z[..., iu] - z[..., ju])


def jastrow_log(z, alpha: float, radius: float = 0.0, strict: bool = True) -> np.ndarray:
    """-alpha * sum_{j<k} w_R(x_j - x_k); R = 0 gives -alpha * sum ln|z_jk|.

    With ``strict`` a coincident pair at R = 0 raises; otherwise it yields +inf.
    """
    d = pair_distances(z)
    if radius <= 0 and strict and np.any(d == 0):
        raise Singularity("Jastrow factor is singular on the diagonal")
    if alpha == 0:
        return np.zeros(d.shape[:-1])
    return -float(alpha) * np.sum(w_radius(d, radius), axis=-1)


def gauge_transform(z, power: int) -> LogComplex:
    """prod_{j<k} ((z_j - z_k)/|z_j - z_k|)^power, unit modulus."""
    z = np.asarray(z, dtype=complex)
    d = pair_distances(z)
    if np.any(d == 0):
        raise Singularity("gauge transform undefined on the diagonal")
    iu, ju = np.triu_indices(z.shape[-1], 1)
    phase = power * np.sum(np.angle(z[..., iu] - z[..., ju]), axis=-1)
    return LogComplex(np.zeros(phase.shape), phase)


def gauge_log(z, power: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    iu, ju = np.triu_indices(z.shape[-1], 1)
    return 1j * power * np.sum(np.angle(z[..., iu] - z[..., ju]), axis=-1)


def confinement_log(z, setting: Setting) -> np.ndarray:
    """sum_l log phi_0(x_l): the oscillator ground state, or 1/L in the box."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    if setting.kind == "box":
        return np.full(z.shape[:-1], -n * math.log(setting.box_side))
    mw = setting.mass * setting.omega
    return -0.5 * mw * np.sum(np.abs(z) ** 2, axis=-1) + 0.5 * n * math.log(mw / math.pi)


class TrialState:
    """Callable evaluator of log psi_alpha for a fixed spec."""

    def __init__(self, spec: TrialStateSpec):
        self.spec = spec
        self.alpha = spec.alpha_value
        if spec.branch == "odd":
            self._table = coloring_table(spec.n_particles, spec.nu)
            self._basis = spec.basis

    def jastrow(self, z, strict: bool = False) -> np.ndarray:
        return jastrow_log(z, self.alpha, self.spec.setting.flux_radius, strict=strict)

    def statistical_part(self, z) -> np.ndarray:
        """Everything except the Jastrow factor (complex log)."""
        spec = self.spec
        z = np.asarray(z, dtype=complex)
        if spec.branch == "even":
            return cluster_poly_log(spec.cluster_spec, z, conjugated=True) + confinement_log(z, spec.setting)
        table = self._table
        plogs = pair_logs(z, conjugated=True)
        edges = subset_edge_logs(table, plogs, spec.mu)
        phi = self._basis.log_values(z, spec.k)  # (..., N, K)
        dets = slater_log(phi[..., table.subsets, :])  # (..., S)
        return coloring_sum(table, edges + dets, spec.cluster_spec.log_normalization)

    def __call__(self, z) -> np.ndarray:
        return self.jastrow(z) + self.statistical_part(z)

    def evaluate(self, config) -> LogComplex:
        z = config.positions if isinstance(config, Configuration) else np.asarray(config, dtype=complex)
        if self.spec.setting.flux_radius <= 0:
            Configuration(z).require_off_diagonal()
        return LogComplex.from_clog(self(z))


def eval_psi_even(spec: TrialStateSpec, config) -> LogComplex:
    if spec.branch != "even":
        raise InvalidSpec("eval_psi_even needs an even numerator")
    return TrialState(spec).evaluate(config)


def eval_psi_odd(spec: TrialStateSpec, config) -> LogComplex:
    if spec.branch != "odd":
        raise InvalidSpec("eval_psi_odd needs an odd numerator")
    return TrialState(spec).evaluate(config)


def angular_momentum_forms(mu: int, nu: int, k: int) -> tuple[Fraction, Fraction]:
    """Both closed forms of L for the even-branch state: -mu nu C(K,2) and -alpha C(N,2) + alpha (nu-1) N / 2."""
    n = nu * k
    alpha = Fraction(mu, nu)
    first = Fraction(-mu * nu * k * (k - 1), 2)
    second = -alpha * Fraction(n * (n - 1), 2) + alpha * Fraction((nu - 1) * n, 2)
    return first, second


def angular_momentum(spec: TrialStateSpec) -> Fraction:
    l_edges = angular_momentum_forms(spec.mu, spec.nu, spec.k)[0]
    if spec.branch == "even":
        return l_edges
    kind = spec.basis_kind
    if kind == "lowest-landau-level":
        return l_edges - Fraction(spec.nu * spec.k * (spec.k - 1), 2)
    if kind == "oscillator" and spec.k in magic_numbers(spec.k)[0]:
        return l_edges
    raise InvalidSpec(f"angular momentum is not defined for the odd branch with {kind} basis and K = {spec.k}")


def state_degree(spec: TrialStateSpec, with_regulator=None) -> Fraction:
    """Homogeneity degree of psi_alpha, -alpha (nu-1) N / 2, or of Phi_0 psi_alpha.

    ``with_regulator`` may be a regulator spec (anything with ``.family``) or
    a family name. Only the nearest-neighbor regulator has a definite degree,
    alpha (nu-1) N; the constant regulator leaves the degree unchanged.
    """
    if spec.branch != "even":
        raise InvalidSpec("degree is not defined for the odd branch (polynomial in both z and conj z)")
    alpha = spec.alpha.value
    deg = -alpha * Fraction((spec.nu - 1) * spec.n_particles, 2)
    if with_regulator is None:
        return deg
    family = getattr(with_regulator, "family", with_regulator)
    if family == "constant":
        return deg
    if family == "nearest-neighbor":
        return deg + alpha * (spec.nu - 1) * spec.n_particles
    raise InvalidSpec(f"regulator family {family!r} is not homogeneous")
