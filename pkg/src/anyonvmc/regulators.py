"""Regularizing factors Phi for Psi = Phi * psi_alpha.

All families are real and positive off the diagonal. ``log_phi`` returns
log Phi; ``grad_log_phi`` returns grad_j log Phi for every particle as a
complex number (d/dx + i d/dy).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .logcomplex import LogComplex

FAMILIES = ("parametric-r0", "nearest-neighbor", "bijl-jastrow", "dyson", "constant")

ALIASES = {
    "phi-r0": "parametric-r0",
    "r0": "parametric-r0",
    "phi-0": "nearest-neighbor",
    "phi0": "nearest-neighbor",
    "nn": "nearest-neighbor",
    "bj": "bijl-jastrow",
    "jastrow": "bijl-jastrow",
}


@dataclass(frozen=True)
class PairProfile:
    """Two-particle correlation f(r) given through log f and its r-derivative."""

    log_f: Callable[[np.ndarray], np.ndarray]
    dlog_f: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    params: tuple = ()


def hard_core_profile(c: float = 1.0, s: float = 2.0, r0: float = 1.0) -> PairProfile:
    """f(r) = exp(-(c r0 / r)^s): vanishes faster than any power at contact, tends to 1 far out."""
    a = c * r0

    def log_f(r):
        with np.errstate(divide="ignore"):
            return -((a / np.asarray(r, dtype=float)) ** s)

    def dlog_f(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return s * a ** s * r ** (-s - 1)

    return PairProfile(log_f, dlog_f, "hard-core", (c, s, r0))


@dataclass(frozen=True)
class RegulatorSpec:
    family: str = "constant"
    alpha: float = 0.0
    nu: int = 1
    r0: float = 1.0
    profile: PairProfile = field(default_factory=hard_core_profile)
    boundary: bool = False
    box_side: float = 1.0

    def __post_init__(self):
        family = ALIASES.get(self.family, self.family)
        if family not in FAMILIES:
            raise ValueError(f"unknown regulator family {self.family!r}; choose from {FAMILIES}")
        object.__setattr__(self, "family", family)
        if family == "parametric-r0" and not self.r0 > 0:
            raise ValueError("r0 must be > 0")
        if self.boundary and not self.box_side > 0:
            raise ValueError("box_side must be > 0")


def _pair_geometry(z):
    z = np.asarray(z, dtype=complex)
    d = z[..., :, None] - z[..., None, :]
    r = np.abs(d)
    n = z.shape[-1]
    r_masked = r + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
    return d, r, r_masked


def _nn_neighbors(r_masked: np.ndarray, count: int) -> np.ndarray:
    # stable sort: equal distances resolved by particle index
    return np.argsort(r_masked, axis=-1, kind="stable")[..., :count]


def has_ties(spec: RegulatorSpec, z) -> np.ndarray:
    """True where the neighbor set used by nearest-neighbor/Dyson is ambiguous."""
    _, _, rm = _pair_geometry(z)
    if spec.family == "nearest-neighbor" and spec.nu > 1 and rm.shape[-1] > spec.nu:
        srt = np.sort(rm, axis=-1)
        return np.any(srt[..., spec.nu - 2] == srt[..., spec.nu - 1], axis=-1)
    if spec.family == "dyson":
        srt = np.sort(rm, axis=-1)
        return np.any(srt[..., 0:1] == srt[..., 1:2], axis=-1) if rm.shape[-1] > 2 else np.zeros(rm.shape[:-2], bool)
    return np.zeros(rm.shape[:-2], dtype=bool)


def _dyson_pairs(z):
    """Index pairs (a_i, b_i): particle a_i in centroid-distance order paired with its nearest predecessor."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    centroid = np.mean(z, axis=-1, keepdims=True)
    order = np.argsort(np.abs(z - centroid), axis=-1, kind="stable")
    zo = np.take_along_axis(z, order, axis=-1)
    a_idx, b_idx = [], []
    for i in range(1, n):
        dist = np.abs(zo[..., i : i + 1] - zo[..., :i])
        j = np.argmin(dist, axis=-1)
        a_idx.append(order[..., i])
        b_idx.append(np.take_along_axis(order[..., :i], j[..., None], axis=-1)[..., 0])
    if not a_idx:
        empty = np.zeros(z.shape[:-1] + (0,), dtype=np.intp)
        return empty, empty
    return np.stack(a_idx, axis=-1), np.stack(b_idx, axis=-1)


def _boundary_log(z, side):
    xy = np.stack([z.real, z.imag], axis=-1)
    s = np.sin(np.pi * xy / side)
    # sin(pi) is not exactly zero in floating point, so the walls are masked explicitly
    inside = (xy > 0) & (xy < side)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sum(np.log(np.where(inside, s, 0.0)), axis=(-1, -2))
    return val


def log_phi(spec: RegulatorSpec, z) -> np.ndarray:
    """log Phi; -inf where Phi vanishes (coincident pairs, box walls)."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    fam = spec.family
    a = float(spec.alpha)
    if fam == "constant" or n < 2:
        out = np.zeros(z.shape[:-1])
    elif fam == "parametric-r0":
        iu, ju = np.triu_indices(n, 1)
        r = np.abs(z[..., iu] - z[..., ju])
        with np.errstate(divide="ignore"):
            out = np.sum(2 * a * np.log(r) - a * np.log(spec.r0 ** 2 + r * r), axis=-1) if a else np.zeros(z.shape[:-1])
    elif fam == "nearest-neighbor":
        if spec.nu <= 1 or a == 0:
            out = np.zeros(z.shape[:-1])
        else:
            _, _, rm = _pair_geometry(z)
            nn = _nn_neighbors(rm, spec.nu - 1)
            with np.errstate(divide="ignore"):
                out = a * np.sum(np.log(np.take_along_axis(rm, nn, axis=-1)), axis=(-1, -2))
    elif fam == "bijl-jastrow":
        iu, ju = np.triu_indices(n, 1)
        out = np.sum(spec.profile.log_f(np.abs(z[..., iu] - z[..., ju])), axis=-1)
    else:  # dyson
        ia, ib = _dyson_pairs(z)
        r = np.abs(np.take_along_axis(z, ia, -1) - np.take_along_axis(z, ib, -1))
        out = np.sum(spec.profile.log_f(r), axis=-1)
    if spec.boundary:
        out = out + _boundary_log(z, spec.box_side)
    return out


def eval_phi(spec: RegulatorSpec, config) -> LogComplex:
    z = getattr(config, "positions", config)
    lp = log_phi(spec, z)
    return LogComplex(lp, np.zeros_like(lp))


def _scatter_pair_gradient(z, ia, ib, coef):
    """grad_j of sum_i g(|z_a - z_b|) given coef_i = g'(r)/r: +coef*(z_a - z_b) on a, minus on b."""
    z = np.asarray(z, dtype=complex)
    za = np.take_along_axis(z, ia, -1)
    zb = np.take_along_axis(z, ib, -1)
    contrib = coef * (za - zb)
    grad = np.zeros(z.shape, dtype=complex)
    flat = grad.reshape(-1, z.shape[-1])
    rows = np.arange(flat.shape[0])[:, None]
    np.add.at(flat, (np.broadcast_to(rows, ia.reshape(flat.shape[0], -1).shape), ia.reshape(flat.shape[0], -1)), contrib.reshape(flat.shape[0], -1))
    np.add.at(flat, (np.broadcast_to(rows, ib.reshape(flat.shape[0], -1).shape), ib.reshape(flat.shape[0], -1)), -contrib.reshape(flat.shape[0], -1))
    return flat.reshape(z.shape)


def grad_log_phi(spec: RegulatorSpec, z) -> np.ndarray:
    """Analytic grad_j log Phi as complex numbers, shape ``z.shape``."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    fam = spec.family
    a = float(spec.alpha)
    grad = np.zeros(z.shape, dtype=complex)
    if n >= 2 and fam != "constant":
        d, r, _ = _pair_geometry(z)
        off = ~np.eye(n, dtype=bool)
        with np.errstate(divide="ignore", invalid="ignore"):
            r2 = np.where(off, r * r, 1.0)
            if fam == "parametric-r0":
                coef = np.where(off, 2 * a * spec.r0 ** 2 / (r2 * (spec.r0 ** 2 + r2)), 0.0)
                grad = np.sum(coef * d, axis=-1)
            elif fam == "bijl-jastrow":
                rr = np.where(off, r, 1.0)
                coef = np.where(off, spec.profile.dlog_f(rr) / rr, 0.0)
                grad = np.sum(coef * d, axis=-1)
            elif fam == "nearest-neighbor":
                if spec.nu > 1 and a != 0:
                    _, _, rm = _pair_geometry(z)
                    nn = _nn_neighbors(rm, spec.nu - 1)
                    ia = np.broadcast_to(np.arange(n)[:, None], nn.shape).reshape(nn.shape[:-2] + (-1,))
                    ib = nn.reshape(nn.shape[:-2] + (-1,))
                    rab = np.abs(np.take_along_axis(z, ia, -1) - np.take_along_axis(z, ib, -1))
                    grad = _scatter_pair_gradient(z, ia, ib, a / rab ** 2)
            else:  # dyson
                ia, ib = _dyson_pairs(z)
                rab = np.abs(np.take_along_axis(z, ia, -1) - np.take_along_axis(z, ib, -1))
                grad = _scatter_pair_gradient(z, ia, ib, spec.profile.dlog_f(rab) / rab)
    if spec.boundary:
        k = np.pi / spec.box_side
        with np.errstate(divide="ignore", invalid="ignore"):
            grad = grad + k / np.tan(k * z.real) + 1j * k / np.tan(k * z.imag)
    return grad


def grad_phi(spec: RegulatorSpec, config) -> np.ndarray:
    return grad_log_phi(spec, getattr(config, "positions", config))


def grad_phi_fd(spec: RegulatorSpec, config, step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of log Phi (oracle for ``grad_log_phi``)."""
    if not step > 0:
        raise ValueError("step must be > 0")
    z = np.asarray(getattr(config, "positions", config), dtype=complex)
    n = z.shape[-1]
    grad = np.zeros(z.shape, dtype=complex)
    for j in range(n):
        for unit in (1.0, 1j):
            e = np.zeros(n, dtype=complex)
            e[j] = unit * step
            diff = (log_phi(spec, z + e) - log_phi(spec, z - e)) / (2 * step)
            grad[..., j] += unit * diff
    return grad


def kinetic_weight(spec: RegulatorSpec, z) -> np.ndarray:
    """sum_j |grad_j log Phi|^2."""
    g = grad_log_phi(spec, z)
    return np.sum(np.abs(g) ** 2, axis=-1)
