"""Amplitude maps: arg Psi and log|Psi|^2 as functions of one or two free particles.

Single mode moves one particle over the window with N - 1 fixed. Relative
mode places the last two particles at c +/- r/2 and scans the relative
coordinate r. Preset fixed positions are snapped so every coincidence with
a fixed particle falls exactly on a grid node.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .regulators import RegulatorSpec, log_phi
from .trialstate import TrialState, TrialStateSpec


def _cluster(center: complex, size: int, spread: float, angle: float = 0.3) -> list:
    if size == 1:
        return [center]
    return [center + spread * complex(math.cos(angle + 2 * math.pi * i / size), math.sin(angle + 2 * math.pi * i / size)) for i in range(size)]


@dataclass(frozen=True)
class MapConfig:
    alpha: str = "2/3"
    n_particles: int = 12
    r0: float = 1.3
    fixed: tuple = ()
    half_width: float = 10.0
    resolution: int = 200
    mode: str = "single"  # or "relative"
    pair_center: complex = 0j
    circle_radius: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("single", "relative"):
            raise ValueError("mode must be 'single' or 'relative'")
        free = 1 if self.mode == "single" else 2
        if len(self.fixed) != self.n_particles - free:
            raise ValueError(f"{self.mode} mode needs {self.n_particles - free} fixed positions, got {len(self.fixed)}")
        if self.resolution < 2 or self.half_width <= 0:
            raise ValueError("need resolution >= 2 and half_width > 0")

    @property
    def axis(self) -> np.ndarray:
        return symmetric_axis(self.half_width, self.resolution)


def symmetric_axis(half_width: float, resolution: int) -> np.ndarray:
    """linspace(-h, h, n) made exactly antisymmetric, so -x is a node whenever x is."""
    a = np.linspace(-half_width, half_width, resolution)
    return 0.5 * (a - a[::-1])


def _snap(values, axis, factor: float) -> tuple:
    """Move each point so that factor * point lies on a grid node."""
    step = axis[1] - axis[0]
    out = []
    for v in values:
        ix = int(np.clip(round((factor * v.real - axis[0]) / step), 0, len(axis) - 1))
        iy = int(np.clip(round((factor * v.imag - axis[0]) / step), 0, len(axis) - 1))
        out.append(complex(axis[ix], axis[iy]) / factor)
    return tuple(out)


def figure2_fixed(position: int = 0) -> tuple:
    """Two 3-clusters, two 2-clusters and one single particle (three positions)."""
    singles = [5.85 - 0.2j, 5.85 - 3.2j, 5.85 - 5.9j]
    pts = _cluster(-1.25 + 8.0j, 3, 0.4) + _cluster(-2.25 + 0.8j, 3, 0.4)
    pts += _cluster(3.8 + 0.9j, 2, 0.35) + _cluster(6.35 - 6.45j, 2, 0.35)
    pts.append(singles[position])
    return tuple(pts)


def figure3_fixed(position: int = 0) -> tuple:
    """Three 3-clusters at distances 4.75, 6.5, 8.5 and one particle on the horizontal axis.

    A cluster at distance d appears at |r| = 2d in the relative-coordinate
    plot, so the nearest one sits on a circle of radius 9.5 there.
    """
    singles = [1.0, 2.0, 3.0]
    centers = [4.75j, 6.5 * complex(math.cos(7 * math.pi / 6), math.sin(7 * math.pi / 6)), 8.5 * complex(math.cos(-math.pi / 6), math.sin(-math.pi / 6))]
    pts = []
    for c in centers:
        pts += _cluster(c, 3, 0.4)
    pts.append(complex(singles[position], 0.0))
    return tuple(pts)


def preset(name: str, resolution: int = 200) -> MapConfig:
    """'fig2a'..'fig2c' (single mode on [-10,10]^2) or 'fig3a'..'fig3c' (relative mode on [-20,20]^2)."""
    idx = {"a": 0, "b": 1, "c": 2}
    if len(name) != 5 or name[:4] not in ("fig2", "fig3") or name[4] not in idx:
        raise ValueError(f"unknown preset {name!r}; use fig2a..fig2c or fig3a..fig3c")
    i = idx[name[4]]
    if name.startswith("fig2"):
        axis = symmetric_axis(10.0, resolution)
        return MapConfig(fixed=_snap(figure2_fixed(i), axis, 1.0), half_width=10.0, resolution=resolution)
    axis = symmetric_axis(20.0, resolution)
    fixed = _snap(figure3_fixed(i), axis, 2.0)
    nearest = 2 * min(abs(complex(np.mean(fixed[3 * q : 3 * q + 3]))) for q in range(3))
    return MapConfig(fixed=fixed, half_width=20.0, resolution=resolution, mode="relative", circle_radius=nearest)


@dataclass
class AmplitudeMap:
    x: np.ndarray
    y: np.ndarray
    arg: np.ndarray  # (res, res), rows indexed by y
    log_abs2: np.ndarray
    config: MapConfig = field(repr=False, default=None)

    def rows(self):
        for iy, yv in enumerate(self.y):
            for ix, xv in enumerate(self.x):
                yield float(xv), float(yv), float(self.arg[iy, ix]), float(self.log_abs2[iy, ix])


def _positions(cfg: MapConfig, w: np.ndarray) -> np.ndarray:
    fixed = np.array(cfg.fixed, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if cfg.mode == "single":
        free = w[..., None]
    else:
        free = np.stack([cfg.pair_center + w / 2, cfg.pair_center - w / 2], axis=-1)
    return np.concatenate([np.broadcast_to(fixed, w.shape + fixed.shape), free], axis=-1)


def amplitude(cfg: MapConfig, w) -> np.ndarray:
    """Complex log Psi at free coordinate(s) w; exact zeros of Phi give -inf."""
    spec = TrialStateSpec(cfg.alpha, cfg.n_particles)
    reg = RegulatorSpec("parametric-r0", alpha=float(spec.alpha), nu=spec.nu, r0=cfg.r0)
    z = _positions(cfg, w)
    lp = log_phi(reg, z)
    out = np.full(lp.shape, complex(-np.inf, 0.0))
    ok = np.isfinite(lp)
    if np.any(ok):
        out[ok] = lp[ok] + TrialState(spec)(z[ok])
    return out


def psi_map(cfg: MapConfig) -> AmplitudeMap:
    axis = cfg.axis
    xx, yy = np.meshgrid(axis, axis)
    w = (xx + 1j * yy).ravel()
    vals = np.concatenate([amplitude(cfg, w[i : i + 4096]) for i in range(0, w.size, 4096)])
    vals = vals.reshape(xx.shape)
    dead = np.isneginf(vals.real)
    arg = np.where(dead, np.nan, np.angle(np.exp(1j * vals.imag)))
    return AmplitudeMap(axis, axis.copy(), arg, np.where(dead, -np.inf, 2 * vals.real), cfg)


def winding(phases: np.ndarray) -> float:
    """Total phase change around a closed loop of samples (differences wrapped into [-pi, pi))."""
    p = np.asarray(phases, dtype=float)
    d = np.diff(np.concatenate([p, p[:1]]))
    return float(np.sum(np.mod(d + np.pi, 2 * np.pi) - np.pi))


def grid_circle_winding(amap: AmplitudeMap, radius: float, center: complex = 0j, samples: int = 4096) -> float:
    """Winding of arg Psi along the grid nodes nearest to a circle."""
    t = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
    pts = center + radius * np.exp(1j * t)
    step = amap.x[1] - amap.x[0]
    ix = np.clip(np.rint((pts.real - amap.x[0]) / step).astype(int), 0, len(amap.x) - 1)
    iy = np.clip(np.rint((pts.imag - amap.y[0]) / step).astype(int), 0, len(amap.y) - 1)
    keep = np.ones(len(ix), dtype=bool)
    keep[1:] = (ix[1:] != ix[:-1]) | (iy[1:] != iy[:-1])
    phases = amap.arg[iy[keep], ix[keep]]
    if np.any(np.isnan(phases)):
        raise ValueError("the loop passes through a zero of Psi")
    return winding(phases)


def circle_winding(cfg: MapConfig, radius: float, center: complex = 0j, samples: int = 4096) -> float:
    """Winding of arg Psi along a finely sampled circle (independent of the grid)."""
    t = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
    return winding(amplitude(cfg, center + radius * np.exp(1j * t)).imag)
