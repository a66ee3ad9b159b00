"""Magnetic potentials, finite-difference local energies and identity checks.

The kinetic operator is sum_j (1/2m) D_j^2 with D_j = -i grad_j + a_j, where
a_j = alpha A_j + A_ext(x_j) is a real, divergence-free vector potential.
For a state Psi = exp(u) the local energy is

    -(1/2m) [lap u + grad u . grad u] - (i/m) a . grad u + (1/2m) |a|^2 + V

and all derivatives of u are taken by central differences. Phase
differences are wrapped into [-pi, pi) so branch cuts of arg Psi are harmless.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .fractionality import Singularity
from .regulators import RegulatorSpec, kinetic_weight
from .trialstate import TrialState, TrialStateSpec, pair_distances, state_degree, w_radius

LogPsi = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Hamiltonian:
    """alpha, mass, trap frequency, flux radius R, and A_ext = ext_coeff * x^perp."""

    alpha: float = 0.0
    mass: float = 1.0
    omega: float = 1.0
    flux_radius: float = 0.0
    ext_coeff: float = 0.0

    @classmethod
    def for_trial(cls, spec: TrialStateSpec) -> "Hamiltonian":
        s = spec.setting
        ext = 0.0
        omega = s.trap_omega
        if spec.branch == "odd" and spec.basis_kind == "lowest-landau-level":
            ext, omega = s.mass * s.omega, 0.0
        return cls(spec.alpha_value, s.mass, omega, s.flux_radius, ext)

    def potential(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return 0.5 * self.mass * self.omega ** 2 * np.sum(np.abs(z) ** 2, axis=-1)


@dataclass(frozen=True)
class GasSpec:
    box_side: float
    n_particles: int
    flux_radius: float = 0.0

    def __post_init__(self):
        if self.box_side <= 0 or self.n_particles < 1 or self.flux_radius < 0:
            raise ValueError("need box_side > 0, n_particles >= 1, flux_radius >= 0")

    @property
    def density(self) -> float:
        return self.n_particles / self.box_side ** 2

    @property
    def filling(self) -> float:
        return self.flux_radius * math.sqrt(self.density)


def vector_potential(z, radius: float = 0.0, strict: bool = True) -> np.ndarray:
    """A_j at every particle as complex numbers Ax + i Ay; shape ``z.shape``."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    d = z[..., :, None] - z[..., None, :]
    r = np.abs(d)
    off = ~np.eye(n, dtype=bool)
    if radius <= 0 and strict and np.any((r == 0) & off):
        raise Singularity("vector potential evaluated at a flux center")
    denom = np.where(off, np.maximum(r, radius) ** 2, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.sum(np.where(off, 1j * d / denom, 0.0), axis=-1)


def vector_potential_at(x, centers, radius: float = 0.0) -> np.ndarray:
    """Field of flux tubes at ``centers`` evaluated at the point(s) x."""
    x = np.asarray(x, dtype=complex)
    c = np.asarray(centers, dtype=complex)
    d = x[..., None] - c
    r = np.abs(d)
    if radius <= 0 and np.any(r == 0):
        raise Singularity("vector potential evaluated at a flux center")
    return np.sum(1j * d / np.maximum(r, radius) ** 2, axis=-1)


def w_cap(z, radius: float) -> np.ndarray:
    """sum_{j<k} w_R(x_j - x_k)."""
    return np.sum(w_radius(pair_distances(z), radius), axis=-1)


def big_w(z, radius: float) -> np.ndarray:
    """W_R = (2/R^2) * number of ordered pairs closer than R; 0 for R = 0."""
    d = pair_distances(z)
    if radius <= 0:
        return np.zeros(d.shape[:-1])
    return (2.0 / radius ** 2) * 2 * np.sum(d <= radius, axis=-1)


def default_step(z, radius: float = 0.0) -> np.ndarray:
    """1e-3 * min(min pair distance, R if R > 0, 1), one value per configuration."""
    d = pair_distances(z)
    scale = np.min(d, axis=-1) if d.shape[-1] else np.ones(d.shape[:-1])
    if radius > 0:
        scale = np.minimum(scale, radius)
    return 1e-3 * np.minimum(scale, 1.0)


def _wrap(du: np.ndarray) -> np.ndarray:
    return du.real + 1j * (np.mod(du.imag + np.pi, 2 * np.pi) - np.pi)


_STENCILS = {
    2: ((1,), (1.0,), (1.0,), 2.0, 1.0),
    4: ((1, 2), (8.0, -1.0), (16.0, -1.0), 12.0, 12.0),
}


def log_derivatives(logpsi: LogPsi, z, step, order: int = 4):
    """grad u (shape z.shape + (2,), complex) and lap u (shape z.shape) by central differences.

    ``step`` is a scalar or one value per configuration.
    """
    if order not in _STENCILS:
        raise ValueError("order must be 2 or 4")
    z = np.asarray(z, dtype=complex)
    batch, n = z.shape[:-1], z.shape[-1]
    h = np.broadcast_to(np.asarray(step, dtype=float), batch)
    offsets, gw, lw, gden, lden = _STENCILS[order]
    units = []
    for j in range(n):
        for unit in (1.0, 1j):
            for o in offsets:
                for sgn in (1, -1):
                    e = np.zeros(n, dtype=complex)
                    e[j] = sgn * o * unit
                    units.append(e)
    units = np.array(units)  # (S, N)
    zz = z[None, ...] + units.reshape((len(units),) + (1,) * len(batch) + (n,)) * h[None, ..., None]
    u0 = np.asarray(logpsi(z), dtype=complex)
    us = np.asarray(logpsi(zz.reshape(-1, n)), dtype=complex).reshape((len(units),) + batch)
    du = _wrap(us - u0[None]).reshape((n, 2, len(offsets), 2) + batch)
    plus, minus = du[:, :, :, 0], du[:, :, :, 1]
    gw = np.array(gw).reshape((1, 1, -1) + (1,) * len(batch))
    lw = np.array(lw).reshape((1, 1, -1) + (1,) * len(batch))
    grad = np.sum(gw * (plus - minus), axis=2) / (gden * h)  # (N, 2, *batch)
    lap = np.sum(np.sum(lw * (plus + minus), axis=2), axis=1) / (lden * h * h)
    return np.moveaxis(grad, (0, 1), (-2, -1)), np.moveaxis(lap, 0, -1)


def _vec(c: np.ndarray) -> np.ndarray:
    return np.stack([c.real, c.imag], axis=-1)


def kinetic_fd(logpsi: LogPsi, z, ham: Hamiltonian, step: Optional[float] = None, order: int = 4) -> np.ndarray:
    """Complex local energy (H Psi)/Psi; the imaginary part is a discretization diagnostic."""
    z = np.asarray(z, dtype=complex)
    if step is None:
        step = default_step(z, ham.flux_radius)
    d = pair_distances(z)
    if d.shape[-1] and np.any(np.asarray(step) > 0.1 * np.min(d, axis=-1)):
        warnings.warn("FD step is large against the minimum pair distance", stacklevel=2)
    grad, lap = log_derivatives(logpsi, z, step, order)
    a = _vec(ham.alpha * vector_potential(z, ham.flux_radius) + ham.ext_coeff * 1j * z)
    inv2m = 0.5 / ham.mass
    kin = -inv2m * np.sum(lap + np.sum(grad * grad, axis=-1), axis=-1)
    kin = kin - (1j / ham.mass) * np.sum(a * grad, axis=(-1, -2)) + inv2m * np.sum(a * a, axis=(-1, -2))
    return kin + ham.potential(z)


def kinetic_fd_halving(logpsi: LogPsi, z, ham: Hamiltonian, step=None, order: int = 4, levels: int = 4) -> np.ndarray:
    """Local energy at the step where successive halvings agree best.

    Steps h, h/2, ..., h/2^levels are tried per configuration. Truncation
    error shrinks and rounding error grows as h falls; the smallest gap
    between neighbors marks the crossover. Needed near zeros of Psi, where
    derivatives of log Psi are large and its value loses digits.
    """
    z = np.asarray(z, dtype=complex)
    h0 = default_step(z, ham.flux_radius) if step is None else np.broadcast_to(np.asarray(step, dtype=float), z.shape[:-1])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals = np.stack([kinetic_fd(logpsi, z, ham, step=h0 / 2 ** k, order=order) for k in range(levels + 1)])
    gaps = np.abs(np.diff(vals, axis=0))
    # the coarser member of the closest pair carries less rounding error
    best = np.argmin(gaps, axis=0)
    return np.take_along_axis(vals, best[None], axis=0)[0]


def random_configurations(
    rng: np.random.Generator,
    n: int,
    count: int,
    min_pair: float = 0.3,
    scale: float = 1.0,
    avoid_radius: float = 0.0,
    margin: float = 0.05,
    max_tries: int = 100000,
) -> np.ndarray:
    """Gaussian configurations with every pair distance >= min_pair (and away from R by margin*R)."""
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not draw configurations meeting the pair-distance floor")
        z = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
        d = pair_distances(z)
        if d.size and np.min(d) < min_pair:
            continue
        if avoid_radius > 0 and np.any(np.abs(d - avoid_radius) < margin * avoid_radius):
            continue
        out.append(z)
    return np.array(out)


@dataclass(frozen=True)
class Residuals:
    values: np.ndarray
    tolerance: float

    @property
    def max(self) -> float:
        return float(np.max(self.values))

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def passed(self) -> bool:
        return bool(self.max < self.tolerance)

    def as_dict(self) -> dict:
        return {"max": self.max, "mean": self.mean, "tolerance": self.tolerance, "pass": self.passed, "cases": len(self.values)}


def singular_eigenvalue(spec: TrialStateSpec) -> float:
    """omega * (N + deg psi_alpha)."""
    return spec.setting.omega * float(spec.n_particles + state_degree(spec))


def verify_singular_eigen(
    spec: TrialStateSpec, configs, step: Optional[float] = None, order: int = 4, tol: float = 1e-5, halving: bool = True
) -> Residuals:
    """Relative deviation of the FD local energy of psi_alpha from omega (N + deg).

    A fixed ``step`` is used as given; otherwise ``halving`` picks the step
    per configuration with ``kinetic_fd_halving``.
    """
    if spec.branch != "even" or spec.setting.kind != "trap" or spec.setting.extended:
        raise ValueError("the singular-eigenfunction identity needs the even branch in a trap with R = 0")
    state = TrialState(spec)
    ham = Hamiltonian.for_trial(spec)
    target = singular_eigenvalue(spec)
    configs = np.atleast_2d(np.asarray(configs, dtype=complex))
    res = []
    for z in configs:
        if step is None and halving:
            e = kinetic_fd_halving(state, z[None], ham, order=order)[0]
        else:
            e = kinetic_fd(state, z[None], ham, step=step if step is not None else default_step(z[None]), order=order)[0]
        res.append(abs(e - target) / abs(target) if target else abs(e))
    return Residuals(np.array(res), tol)


def pauli_factor(name: str = "one", power: int = 2, anti: bool = True) -> LogPsi:
    """Library of analytic test factors: 'one', 'monomial' (prod z_j^power), 'vandermonde' (prod z_jk^power).

    ``anti`` conjugates the argument, giving the anti-analytic f_-(conj z).
    """
    def f(z):
        z = np.asarray(z, dtype=complex)
        w = np.conj(z) if anti else z
        if name == "one":
            return np.zeros(z.shape[:-1], dtype=complex)
        if name == "monomial":
            return power * np.sum(np.log(w), axis=-1)
        if name == "vandermonde":
            iu, ju = np.triu_indices(z.shape[-1], 1)
            return power * np.sum(np.log(w[..., iu] - w[..., ju]), axis=-1)
        raise ValueError(f"unknown test factor {name!r}")

    return f


def pauli_state(factor: LogPsi, alpha: float, radius: float, sign: int) -> LogPsi:
    """Psi = exp(-sign * alpha * sum w_R) * f."""
    return lambda z: -sign * alpha * w_cap(z, radius) + factor(z)


def pauli_residual(factor: LogPsi, z, alpha: float, radius: float, sign: int, step: Optional[float] = None, order: int = 4) -> np.ndarray:
    """|sum_j D_j^2 Psi / Psi - sign * alpha W_R| for Psi = exp(-sign alpha sum w_R) f."""
    if radius <= 0:
        raise ValueError("the Pauli identity check needs R > 0")
    z = np.asarray(z, dtype=complex)
    ham = Hamiltonian(alpha=alpha, mass=0.5, omega=0.0, flux_radius=radius)
    if step is None:
        step = default_step(z, radius)
    e = kinetic_fd(pauli_state(factor, alpha, radius, sign), z, ham, step=step, order=order)
    return np.abs(e - sign * alpha * big_w(z, radius))


def verify_pauli_identity(
    factor: LogPsi,
    configs,
    alpha: float,
    radius: float,
    sign: int = 1,
    tol: float = 1e-5,
    order: int = 4,
) -> Residuals:
    configs = np.atleast_2d(np.asarray(configs, dtype=complex))
    res = np.concatenate([pauli_residual(factor, z[None], alpha, radius, sign, order=order) for z in configs])
    return Residuals(res, tol)


def local_energy_prop1(spec: TrialStateSpec, regulator: RegulatorSpec, z) -> np.ndarray:
    """omega (N + deg psi) + (1/2m) sum_j |grad_j log Phi|^2."""
    if spec.branch != "even" or spec.setting.kind != "trap" or spec.setting.extended:
        raise ValueError("the Proposition-1 estimator needs the even branch in a trap with R = 0")
    return singular_eigenvalue(spec) + 0.5 / spec.setting.mass * kinetic_weight(regulator, z)


def local_energy_prop3(spec: TrialStateSpec, regulator: RegulatorSpec, z) -> np.ndarray:
    """(1/2m) (sum_j |grad_j log Phi|^2 + alpha W_R)."""
    s = spec.setting
    if spec.branch != "even" or s.kind != "box" or not s.extended:
        raise ValueError("the Proposition-3 estimator needs the even branch in a box with R > 0")
    return 0.5 / s.mass * (kinetic_weight(regulator, z) + spec.alpha_value * big_w(z, s.flux_radius))


def current_divergence_residual(logpsi: LogPsi, z, alpha: float, radius: float = 0.0, step: Optional[float] = None, order: int = 4) -> np.ndarray:
    """|div (J + alpha A |psi|^2)| / |psi|^2, relative to the size of its terms."""
    z = np.asarray(z, dtype=complex)
    if step is None:
        step = default_step(z, radius)
    grad, lap = log_derivatives(logpsi, z, step, order)
    a = alpha * _vec(vector_potential(z, radius))
    flow = grad.imag + a
    terms = 2 * np.sum(grad.real * flow, axis=-1)
    div = np.sum(terms + lap.imag, axis=-1)
    scale = np.sum(2 * np.linalg.norm(grad.real, axis=-1) * np.linalg.norm(flow, axis=-1) + np.abs(lap.imag), axis=-1)
    return np.abs(div) / np.where(scale > 0, scale, 1.0)


def current_divergence_check(spec: TrialStateSpec, configs, step: Optional[float] = None, tol: float = 1e-4) -> Residuals:
    state = TrialState(spec)
    configs = np.atleast_2d(np.asarray(configs, dtype=complex))
    r = spec.setting.flux_radius
    res = np.concatenate([current_divergence_residual(state, z[None], spec.alpha_value, r, step) for z in configs])
    return Residuals(res, tol)


def two_anyon_energy(alpha: float, omega: float = 1.0) -> float:
    """Exact ground-state energy of two anyons in a trap: (2 + |alpha|) omega (for |alpha| <= 1)."""
    return (2.0 + abs(alpha)) * omega


def two_anyon_state(alpha: float, mass: float = 1.0, omega: float = 1.0) -> LogPsi:
    """|z_12|^|alpha| exp(-m omega (|x_1|^2 + |x_2|^2) / 2)."""
    def logpsi(z):
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != 2:
            raise ValueError("the two-anyon state needs N = 2")
        gauss = -0.5 * mass * omega * np.sum(np.abs(z) ** 2, axis=-1) + 0j
        if alpha == 0:
            return gauss
        with np.errstate(divide="ignore"):
            return abs(alpha) * np.log(np.abs(z[..., 0] - z[..., 1])) + gauss

    return logpsi
