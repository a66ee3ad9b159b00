"""One-body eigenstates for the trap, the lowest Landau level and the Neumann box.

Points in the plane are complex numbers ``z = x + iy``. All state values
are returned as complex logarithms (``log|phi| + i arg phi``) so that
Slater determinants of many particles far out in the Gaussian tails stay
representable.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .logcomplex import LogComplex

KINDS = ("oscillator", "lowest-landau-level", "neumann-box")


class DomainError(ValueError):
    pass


@lru_cache(maxsize=None)
def oscillator_quantum_numbers(k: int) -> tuple[int, int]:
    """k -> (n_x, n_y): shells n = n_x + n_y in order, n_x ascending inside a shell."""
    if k < 0:
        raise ValueError("k must be >= 0")
    n = int((math.isqrt(8 * k + 1) - 1) // 2)
    nx = k - n * (n + 1) // 2
    return nx, n - nx


@lru_cache(maxsize=None)
def _box_table(count: int) -> tuple[tuple[int, int], ...]:
    m = int(math.ceil(2.0 * math.sqrt(count / math.pi))) + 2
    pairs = [(nx, ny) for nx in range(m + 1) for ny in range(m + 1) if nx * nx + ny * ny <= m * m]
    pairs.sort(key=lambda p: (p[0] ** 2 + p[1] ** 2, p[0], p[1]))
    return tuple(pairs[:count])


def box_quantum_numbers(k: int) -> tuple[int, int]:
    """Energy order on n_x^2 + n_y^2, ties broken lexicographically on (n_x, n_y)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return _box_table(k + 1)[k]


def _hermite_scaled(xi: np.ndarray, n_max: int) -> np.ndarray:
    """p_n(xi) = H_n(xi) / sqrt(2^n n!) for n = 0..n_max, stacked on the last axis."""
    out = np.empty(xi.shape + (n_max + 1,))
    out[..., 0] = 1.0
    if n_max >= 1:
        out[..., 1] = math.sqrt(2.0) * xi
    for n in range(1, n_max):
        out[..., n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[..., n] - math.sqrt(n / (n + 1)) * out[..., n - 1]
    return out


def _signed_log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values)) + 1j * np.where(values < 0, np.pi, 0.0)


@dataclass(frozen=True)
class OneBodyBasis:
    kind: str = "oscillator"
    mass: float = 1.0
    omega: float = 1.0
    box_side: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}; choose from {KINDS}")
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        if self.kind == "neumann-box" and self.box_side <= 0:
            raise ValueError("box_side must be > 0")
        if self.kind != "neumann-box" and self.omega <= 0:
            raise ValueError("omega must be > 0")

    @property
    def length_scale(self) -> float:
        if self.kind == "neumann-box":
            return self.box_side
        return 1.0 / math.sqrt(self.mass * self.omega)

    def quantum_numbers(self, k: int):
        if self.kind == "oscillator":
            return oscillator_quantum_numbers(k)
        if self.kind == "neumann-box":
            return box_quantum_numbers(k)
        return (k,)

    def energy(self, k: int) -> float:
        if self.kind == "oscillator":
            nx, ny = oscillator_quantum_numbers(k)
            return self.omega * (nx + ny + 1)
        if self.kind == "neumann-box":
            nx, ny = box_quantum_numbers(k)
            return math.pi ** 2 * (nx * nx + ny * ny) / (2 * self.mass * self.box_side ** 2)
        # symmetric-gauge LLL: all states degenerate at the bottom of the band
        return self.omega

    def external_vector_potential(self, z):
        """A_ext as a complex vector (Ax + i Ay); nonzero only for the LLL."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "lowest-landau-level":
            return 1j * self.mass * self.omega * z
        return np.zeros_like(z)

    def external_potential(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "oscillator":
            return 0.5 * self.mass * self.omega ** 2 * np.abs(z) ** 2
        return np.zeros(z.shape)

    def log_values(self, z, count: int) -> np.ndarray:
        """Complex logs of phi_0..phi_{count-1} at z; shape ``z.shape + (count,)``."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "oscillator":
            return self._oscillator_logs(z, count)
        if self.kind == "lowest-landau-level":
            return self._lll_logs(z, count)
        return self._box_logs(z, count)

    def _oscillator_logs(self, z, count):
        qn = [oscillator_quantum_numbers(k) for k in range(count)]
        n_max = max(nx + ny for nx, ny in qn)
        s = math.sqrt(self.mass * self.omega)
        xi, eta = s * z.real, s * z.imag
        px, py = _hermite_scaled(xi, n_max), _hermite_scaled(eta, n_max)
        nx = np.array([q[0] for q in qn])
        ny = np.array([q[1] for q in qn])
        vals = px[..., nx] * py[..., ny]
        gauss = -0.5 * (xi ** 2 + eta ** 2) + 0.5 * math.log(self.mass * self.omega / math.pi)
        return _signed_log(vals) + gauss[..., None]

    def _lll_logs(self, z, count):
        mw = self.mass * self.omega
        k = np.arange(count)
        norm = 0.5 * ((k + 1) * math.log(mw) - math.log(math.pi) - np.array([math.lgamma(i + 1) for i in k]))
        with np.errstate(divide="ignore", invalid="ignore"):
            log_r = np.log(np.abs(z))[..., None]
            radial = np.where(k == 0, 0.0, k * log_r)
        return radial - 0.5 * mw * (np.abs(z) ** 2)[..., None] + norm - 1j * k * np.angle(z)[..., None]

    def _box_logs(self, z, count):
        side = self.box_side
        if np.any((z.real < 0) | (z.real > side) | (z.imag < 0) | (z.imag > side)):
            raise DomainError(f"point outside the box [0, {side}]^2")
        qn = _box_table(count)
        nx = np.array([q[0] for q in qn])
        ny = np.array([q[1] for q in qn])
        c = lambda n: np.where(n == 0, 1.0, math.sqrt(2.0))
        vals = (c(nx) * c(ny) / side) * np.cos(np.pi * nx * z.real[..., None] / side) * np.cos(
            np.pi * ny * z.imag[..., None] / side
        )
        return _signed_log(vals)


def oscillator_state(k: int, x, basis: OneBodyBasis = OneBodyBasis()) -> LogComplex:
    if basis.kind != "oscillator":
        basis = OneBodyBasis("oscillator", basis.mass, basis.omega)
    return LogComplex.from_clog(basis.log_values(x, k + 1)[..., k])


def lll_state(k: int, x, basis: OneBodyBasis = OneBodyBasis("lowest-landau-level")) -> LogComplex:
    if basis.kind != "lowest-landau-level":
        basis = OneBodyBasis("lowest-landau-level", basis.mass, basis.omega)
    return LogComplex.from_clog(basis.log_values(x, k + 1)[..., k])


def box_state(k: int, x, basis: OneBodyBasis) -> np.ndarray:
    """Real value of the k-th Neumann eigenfunction of the square box."""
    if basis.kind != "neumann-box":
        raise ValueError("box_state needs a neumann-box basis")
    clog = basis.log_values(x, k + 1)[..., k]
    return np.exp(clog.real) * np.cos(clog.imag)


def magic_numbers(max_k: int, kind: str = "oscillator") -> tuple[list[int], bool]:
    """Particle counts that fill complete shells, and whether the notion applies.

    For the oscillator these are the triangular numbers. The LLL and the box
    impose no degeneracy requirement: every K is admissible and the flag is
    False.
    """
    if max_k < 1:
        raise ValueError("max_k must be >= 1")
    if kind == "oscillator":
        out, s = [], 1
        while s * (s + 1) // 2 <= max_k:
            out.append(s * (s + 1) // 2)
            s += 1
        return out, True
    warnings.warn(f"magic numbers are not shell-specific for {kind}; every K is admissible", stacklevel=2)
    return list(range(1, max_k + 1)), False


def slater_log(phi_logs: np.ndarray) -> np.ndarray:
    """Complex log of det[phi_k(x_l)] from a stack of (K x K) complex-log matrices.

    Rows are rescaled by their largest magnitude before a pivoted LU
    (LAPACK via numpy), so Gaussian tails do not underflow.
    """
    phi_logs = np.asarray(phi_logs, dtype=complex)
    k = phi_logs.shape[-1]
    if k == 0:
        return np.zeros(phi_logs.shape[:-2], dtype=complex)
    row_max = np.max(phi_logs.real, axis=-1, keepdims=True)
    row_max = np.where(np.isfinite(row_max), row_max, 0.0)
    mat = np.exp(phi_logs - row_max)
    sign, logabs = np.linalg.slogdet(mat)
    total = logabs + np.sum(row_max[..., 0], axis=-1)
    out = total + 1j * np.angle(sign)
    return np.where(sign == 0, complex(-np.inf, 0.0), out)


def slater_determinant(basis: OneBodyBasis, k_count: int, positions) -> LogComplex:
    positions = np.asarray(positions, dtype=complex)
    if k_count == 0:
        return LogComplex.one(positions.shape[:-1])
    if positions.shape[-1] != k_count:
        raise ValueError("need exactly K positions")
    return LogComplex.from_clog(slater_log(basis.log_values(positions, k_count)))
