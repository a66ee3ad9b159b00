"""Metropolis sampling of |Phi psi_alpha|^2 and energy estimation.

Each chain carries a batch of walkers. One step proposes a Gaussian
displacement of one randomly chosen particle per walker. Local energies are
recorded once per sweep (N steps) and the per-sweep walker averages form the
time series used for blocking.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .energy import Hamiltonian, kinetic_fd, local_energy_prop1, local_energy_prop3, two_anyon_state
from .fractionality import BoundInputs, cs_bound
from .regulators import RegulatorSpec, log_phi
from .trialstate import Setting, TrialState, TrialStateSpec, angular_momentum, pair_distances

DIAGONAL_EPS = 1e-12
AUDIT_EVERY = 10_000
AUDIT_DRIFT = 1e-8
INVALID_FRACTION = 0.01
TARGET_ACCEPTANCE = (0.3, 0.6)
MIN_BLOCKS = 32


@dataclass
class Model:
    """What the sampler needs: the amplitude, the local energy and the geometry."""

    n_particles: int
    log_amplitude: Callable[[np.ndarray], np.ndarray]
    local_energy: Callable[[np.ndarray], np.ndarray]
    setting: Setting = field(default_factory=Setting)
    estimator: str = "fd"
    cs_inputs: Optional[tuple] = None  # (alpha, L) when the angular momentum is defined

    def log_weight(self, z) -> np.ndarray:
        return 2.0 * np.real(self.log_amplitude(z))


def _fd_energy(logpsi, ham: Hamiltonian):
    """Real part of the FD local energy, step resolved per walker."""
    return lambda z: kinetic_fd(logpsi, z, ham).real


def build_model(spec: TrialStateSpec, regulator: Optional[RegulatorSpec] = None, estimator: str = "auto") -> Model:
    """Model for Psi = Phi psi_alpha; ``estimator`` is 'auto', 'prop1', 'prop3' or 'fd'."""
    regulator = regulator or RegulatorSpec("constant")
    state = TrialState(spec)
    s = spec.setting

    def log_amp(z):
        lp = log_phi(regulator, z)
        with np.errstate(invalid="ignore"):
            out = lp + state(z)
        return np.where(np.isneginf(lp) | np.isnan(out.real), complex(-np.inf, 0.0), out)

    if estimator == "auto":
        if spec.branch == "even" and s.kind == "trap" and not s.extended:
            estimator = "prop1"
        elif spec.branch == "even" and s.kind == "box" and s.extended:
            estimator = "prop3"
        else:
            estimator = "fd"
    if estimator == "prop1":
        energy = lambda z: local_energy_prop1(spec, regulator, z)
    elif estimator == "prop3":
        energy = lambda z: local_energy_prop3(spec, regulator, z)
    elif estimator == "fd":
        energy = _fd_energy(log_amp, Hamiltonian.for_trial(spec))
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    cs = None
    if s.kind == "trap" and not s.extended:
        try:
            cs = (spec.alpha.value, int(angular_momentum(spec)))
        except ValueError:
            cs = None
    return Model(spec.n_particles, log_amp, energy, s, estimator, cs)


def oracle_model(alpha: float, mass: float = 1.0, omega: float = 1.0) -> Model:
    """Exact two-anyon ground state, with the FD local energy."""
    logpsi = two_anyon_state(alpha, mass, omega)
    energy = _fd_energy(logpsi, Hamiltonian(alpha=alpha, mass=mass, omega=omega))
    return Model(2, logpsi, energy, Setting("trap", mass, omega), "fd", (alpha, 0))


@dataclass
class ChainState:
    config: np.ndarray  # (walkers, N) complex
    log_weight: np.ndarray  # (walkers,)
    rng: np.random.Generator
    step_scale: float
    proposed: int = 0
    accepted: int = 0
    audit_drift: float = 0.0
    steps: int = 0


def accept(log_ratio: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Metropolis rule min(1, exp(log_ratio)); NaN or -inf ratios are rejected."""
    with np.errstate(invalid="ignore"):
        return np.isfinite(log_ratio) & (np.log(uniforms) < log_ratio) | (log_ratio == np.inf)


def _reflect(x: np.ndarray, side: float) -> np.ndarray:
    x = np.mod(x, 2 * side)
    return np.where(x > side, 2 * side - x, x)


def metropolis_step(chain: ChainState, model: Model) -> ChainState:
    z = chain.config
    w, n = z.shape
    rng = chain.rng
    j = rng.integers(n, size=w)
    move = chain.step_scale * (rng.normal(size=w) + 1j * rng.normal(size=w))
    new_pos = z[np.arange(w), j] + move
    if model.setting.kind == "box":
        side = model.setting.box_side
        new_pos = _reflect(new_pos.real, side) + 1j * _reflect(new_pos.imag, side)
    trial = z.copy()
    trial[np.arange(w), j] = new_pos
    others = np.abs(trial - new_pos[:, None])
    others[np.arange(w), j] = np.inf
    near_diag = np.min(others, axis=-1) < DIAGONAL_EPS if n > 1 else np.zeros(w, dtype=bool)
    with np.errstate(invalid="ignore", divide="ignore"):
        lw_new = model.log_weight(trial)
    ok = accept(lw_new - chain.log_weight, rng.random(w)) & ~near_diag
    chain.config = np.where(ok[:, None], trial, z)
    chain.log_weight = np.where(ok, lw_new, chain.log_weight)
    chain.proposed += w
    chain.accepted += int(np.sum(ok))
    chain.steps += 1
    if chain.steps % AUDIT_EVERY == 0:
        fresh = model.log_weight(chain.config)
        drift = float(np.max(np.abs(fresh - chain.log_weight)))
        chain.audit_drift = max(chain.audit_drift, drift)
        chain.log_weight = fresh
    return chain


def initial_positions(model: Model, rng: np.random.Generator, walkers: int) -> np.ndarray:
    n, s = model.n_particles, model.setting
    for _ in range(1000):
        if s.kind == "box":
            z = s.box_side * (rng.random((walkers, n)) + 1j * rng.random((walkers, n)))
        else:
            width = math.sqrt(max(n, 1) / (s.mass * max(s.omega, 1e-12)))
            z = width * (rng.normal(size=(walkers, n)) + 1j * rng.normal(size=(walkers, n))) / math.sqrt(2)
        lw = model.log_weight(z)
        if np.all(np.isfinite(lw)):
            return z
    raise RuntimeError("could not find a starting configuration with finite weight")


def default_step_scale(model: Model) -> float:
    s = model.setting
    if s.kind == "box":
        density = model.n_particles / s.box_side ** 2
    else:
        density = s.mass * max(s.omega, 1e-12)
    return 0.5 / math.sqrt(density)


@dataclass(frozen=True)
class BlockingResult:
    std_error: float
    levels: tuple  # standard error per level
    plateau: bool
    tau: float


def blocking(series: np.ndarray, min_blocks: int = MIN_BLOCKS) -> BlockingResult:
    """Flyvbjerg-Petersen blocking: halve the series until fewer than ``min_blocks`` remain."""
    x = np.asarray(series, dtype=float)
    levels = []
    while len(x) >= min_blocks:
        var = np.var(x)
        levels.append(math.sqrt(var / (len(x) - 1)) if len(x) > 1 else 0.0)
        m = len(x) // 2
        x = 0.5 * (x[0 : 2 * m : 2] + x[1 : 2 * m : 2])
    if not levels:
        x = np.asarray(series, dtype=float)
        err = float(np.std(x) / math.sqrt(max(len(x) - 1, 1)))
        return BlockingResult(err, (err,), err == 0.0, float("nan"))
    if levels[0] == 0.0:
        return BlockingResult(0.0, tuple(levels), True, 0.0)
    tail = levels[-3:]
    err = max(tail)
    plateau = len(tail) == 3 and min(tail) >= 0.8 * err
    tau = 0.5 * (err / levels[0]) ** 2 if levels[0] > 0 else 0.0
    return BlockingResult(float(err), tuple(levels), bool(plateau), float(tau))


@dataclass
class EnergyEstimate:
    mean: float
    std_error: float
    n_samples: int
    acceptance_rate: float
    autocorrelation_estimate: float
    block_means: list
    chain_means: list = field(default_factory=list)
    chain_errors: list = field(default_factory=list)
    n_rejected: int = 0
    plateau: bool = True
    flags: list = field(default_factory=list)
    step_scale: float = 0.0
    estimator: str = "fd"

    @property
    def valid(self) -> bool:
        return "invalid" not in self.flags

    def as_dict(self, include_blocks: bool = False) -> dict:
        out = {
            "mean": self.mean,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "acceptance_rate": self.acceptance_rate,
            "autocorrelation_estimate": self.autocorrelation_estimate,
            "n_rejected": self.n_rejected,
            "plateau": self.plateau,
            "valid": self.valid,
            "flags": list(self.flags),
            "chain_means": list(self.chain_means),
            "chain_errors": list(self.chain_errors),
            "step_scale": self.step_scale,
            "estimator": self.estimator,
        }
        if include_blocks:
            out["block_means"] = list(self.block_means)
        return out


@dataclass
class _ChainResult:
    series: np.ndarray
    total: float
    count: int
    rejected: int
    measured: int
    acceptance: float
    drift: float
    step_scale: float


def _tune(chain: ChainState, model: Model, burn_in: int, interval: int = 50) -> None:
    lo, hi = TARGET_ACCEPTANCE
    for start in range(0, burn_in, interval):
        p0, a0 = chain.proposed, chain.accepted
        for _ in range(min(interval, burn_in - start)):
            metropolis_step(chain, model)
        rate = (chain.accepted - a0) / max(chain.proposed - p0, 1)
        if rate < lo:
            chain.step_scale *= max(rate / 0.45, 0.5)
        elif rate > hi:
            chain.step_scale *= min(rate / 0.45, 2.0)


def _run_chain(model: Model, seed_seq: np.random.SeedSequence, steps: int, burn_in: int, walkers: int, measure_every: int, step_scale: Optional[float]) -> _ChainResult:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    z = initial_positions(model, rng, walkers)
    chain = ChainState(z, model.log_weight(z), rng, step_scale or default_step_scale(model))
    _tune(chain, model, burn_in)
    chain.proposed = chain.accepted = 0
    series, total, count, rejected, measured = [], 0.0, 0, 0, 0
    for step in range(1, steps + 1):
        metropolis_step(chain, model)
        if step % measure_every == 0:
            with np.errstate(all="ignore"):
                e = np.asarray(model.local_energy(chain.config), dtype=float)
            good = np.isfinite(e)
            measured += e.size
            rejected += int(e.size - np.sum(good))
            if np.any(good):
                series.append(float(np.mean(e[good])))
                total += float(np.sum(e[good]))
                count += int(np.sum(good))
    return _ChainResult(
        np.array(series), total, count, rejected, measured,
        chain.accepted / max(chain.proposed, 1), chain.audit_drift, chain.step_scale,
    )


def estimate_energy(
    model: Model,
    steps: int = 10_000,
    burn_in: Optional[int] = None,
    seed: int = 0,
    n_chains: int = 4,
    walkers: int = 64,
    measure_every: Optional[int] = None,
    threads: int = 1,
    step_scale: Optional[float] = None,
) -> EnergyEstimate:
    """Pooled mean and blocking error of the local energy over ``n_chains`` independent chains.

    ``steps`` counts post-burn-in steps per chain; each step moves one
    particle in every walker. Samples = walkers * steps / measure_every per chain.
    """
    if steps < 1 or n_chains < 1 or walkers < 1:
        raise ValueError("steps, n_chains and walkers must be >= 1")
    burn_in = steps // 10 if burn_in is None else burn_in
    measure_every = measure_every or model.n_particles
    seeds = np.random.SeedSequence(seed).spawn(n_chains)
    job = lambda s: _run_chain(model, s, steps, burn_in, walkers, measure_every, step_scale)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, seeds))
    else:
        results = [job(s) for s in seeds]

    flags = []
    measured = sum(r.measured for r in results)
    rejected = sum(r.rejected for r in results)
    count = sum(r.count for r in results)
    if count == 0:
        return EnergyEstimate(float("nan"), float("nan"), 0, 0.0, float("nan"), [], n_rejected=rejected, flags=["invalid", "no-samples"])
    if rejected > INVALID_FRACTION * measured:
        flags.append("invalid")
    mean = sum(r.total for r in results) / count
    chain_means, chain_errors, blocks, plateau, taus = [], [], [], True, []
    for r in results:
        b = blocking(r.series)
        chain_means.append(r.total / max(r.count, 1))
        chain_errors.append(b.std_error)
        plateau &= b.plateau
        taus.append(b.tau)
    std_error = math.sqrt(sum(e * e for e in chain_errors)) / n_chains
    series = np.concatenate([r.series for r in results])
    bsize = max(1, len(series) // MIN_BLOCKS)
    blocks = [float(np.mean(series[i : i + bsize])) for i in range(0, bsize * (len(series) // bsize), bsize)]
    if not plateau:
        flags.append("no-plateau")
    if any(r.drift > AUDIT_DRIFT for r in results):
        flags.append("audit-drift")
    if n_chains > 1:
        for i in range(n_chains):
            for k in range(i + 1, n_chains):
                s = math.hypot(chain_errors[i], chain_errors[k])
                if abs(chain_means[i] - chain_means[k]) > 3 * s and s > 0:
                    flags.append("chain-disagreement")
                    break
            else:
                continue
            break
    acc = float(np.mean([r.acceptance for r in results]))
    finite_taus = [t for t in taus if math.isfinite(t)]
    return EnergyEstimate(
        mean=float(mean),
        std_error=float(std_error),
        n_samples=int(count),
        acceptance_rate=acc,
        autocorrelation_estimate=float(np.mean(finite_taus)) if finite_taus else float("nan"),
        block_means=blocks,
        chain_means=[float(m) for m in chain_means],
        chain_errors=[float(e) for e in chain_errors],
        n_rejected=int(rejected),
        plateau=bool(plateau),
        flags=flags,
        step_scale=float(np.mean([r.step_scale for r in results])),
        estimator=model.estimator,
    )


@dataclass(frozen=True)
class CSCheck:
    passed: bool
    threshold: float
    margin: float


def check_cs_bound(estimate: EnergyEstimate, alpha, n_particles: int, angular_momentum_value, omega: float = 1.0) -> CSCheck:
    """Pass iff mean + 3 std_error >= omega (N + |L + alpha N(N-1)/2|); margin = mean - threshold."""
    threshold = float(cs_bound(alpha, BoundInputs(omega=omega, n_particles=n_particles, angular_momentum=angular_momentum_value)))
    return CSCheck(bool(estimate.mean + 3 * estimate.std_error >= threshold), threshold, float(estimate.mean - threshold))


def check_cs_for_model(estimate: EnergyEstimate, model: Model) -> Optional[CSCheck]:
    if model.cs_inputs is None:
        return None
    alpha, l_value = model.cs_inputs
    return check_cs_bound(estimate, alpha, model.n_particles, l_value, model.setting.omega)


@dataclass
class ScanResult:
    grid: list
    estimates: list
    argmin: int
    bracket: tuple

    def rows(self) -> list:
        return [
            {"parameter": p, "mean": e.mean, "std_error": e.std_error, "acceptance": e.acceptance_rate, "valid": e.valid}
            for p, e in zip(self.grid, self.estimates)
        ]


GOLDEN = (math.sqrt(5) - 1) / 2


def golden_bracket(grid: Sequence[float], i: int) -> tuple:
    """Neighbors of the argmin and the next golden-section probe inside them."""
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    x = grid[i]
    wider_right = (hi - x) >= (x - lo)
    probe = x + (1 - GOLDEN) * (hi - x) if wider_right else x - (1 - GOLDEN) * (x - lo)
    return (float(lo), float(hi), float(probe))


def scan_parameter(
    factory: Callable[[float], Model],
    grid: Sequence[float],
    common_random_numbers: bool = True,
    seed: int = 0,
    **kwargs,
) -> ScanResult:
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    estimates = []
    for i, value in enumerate(grid):
        estimates.append(estimate_energy(factory(value), seed=seed if common_random_numbers else seed + i, **kwargs))
    valid = [i for i, e in enumerate(estimates) if e.valid and np.isfinite(e.mean)]
    if not valid:
        raise RuntimeError("every run in the scan was flagged invalid")
    best = min(valid, key=lambda i: estimates[i].mean)
    return ScanResult(grid, estimates, best, golden_bracket(grid, best))
