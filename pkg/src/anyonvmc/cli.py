"""Command-line front end.

Every run resolves a ``RunConfig`` (defaults, then an optional JSON file,
then explicit flags) and echoes it into the output header, so any output
can be replayed with ``--config``.

Exit codes: 0 pass, 2 verification failure, 3 invalid configuration,
4 flagged-invalid Monte Carlo run.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from . import clustering, energy, maps, regulators, trialstate, vmc
from .fractionality import (
    BoundConstants,
    BoundInputs,
    InvalidInput,
    StatisticsParameter,
    alpha_fractionality,
    alpha_star,
    average_field_energy,
    bessel_deriv_first_zero,
    cs_bound,
    gas_bound_asymptotics,
    harmonic_lower_bound,
    harmonic_upper_bound,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INVALID = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class SettingBlock:
    kind: str = "trap"
    mass: float = 1.0
    omega: float = 1.0
    box_side: float = 1.0
    flux_radius: float = 0.0


@dataclass
class RegulatorBlock:
    family: str = "parametric-r0"
    r0: float = 1.0
    c: float = 1.0
    s: float = 2.0
    boundary: bool = False


@dataclass
class SamplerBlock:
    steps: int = 2000
    burn_in: Optional[int] = None
    chains: int = 4
    walkers: int = 64
    measure_every: Optional[int] = None
    seed: int = 0
    threads: int = 1
    deterministic: bool = False
    estimator: str = "auto"


@dataclass
class OutputBlock:
    format: str = "json"
    path: Optional[str] = None
    precision: Optional[int] = None
    blocks_csv: Optional[str] = None


@dataclass
class RunConfig:
    subcommand: str = ""
    alpha: str = "2/3"
    n: int = 6
    setting: SettingBlock = field(default_factory=SettingBlock)
    regulator: RegulatorBlock = field(default_factory=RegulatorBlock)
    sampler: SamplerBlock = field(default_factory=SamplerBlock)
    output: OutputBlock = field(default_factory=OutputBlock)
    options: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        blocks = {"setting": SettingBlock, "regulator": RegulatorBlock, "sampler": SamplerBlock, "output": OutputBlock}
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            if key in blocks:
                sub = {f.name for f in fields(blocks[key])}
                bad = set(value) - sub
                if bad:
                    raise ConfigError(f"unknown keys in {key!r}: {sorted(bad)}")
                kwargs[key] = blocks[key](**value)
            else:
                kwargs[key] = value
        return cls(**kwargs)


# option name -> (config path, default) for flags that live in blocks
_BLOCK_FLAGS = {
    "setting": ("setting", "kind"),
    "mass": ("setting", "mass"),
    "omega": ("setting", "omega"),
    "box_side": ("setting", "box_side"),
    "R": ("setting", "flux_radius"),
    "regulator": ("regulator", "family"),
    "r0": ("regulator", "r0"),
    "profile_c": ("regulator", "c"),
    "profile_s": ("regulator", "s"),
    "boundary": ("regulator", "boundary"),
    "steps": ("sampler", "steps"),
    "burn_in": ("sampler", "burn_in"),
    "chains": ("sampler", "chains"),
    "walkers": ("sampler", "walkers"),
    "measure_every": ("sampler", "measure_every"),
    "seed": ("sampler", "seed"),
    "threads": ("sampler", "threads"),
    "deterministic": ("sampler", "deterministic"),
    "estimator": ("sampler", "estimator"),
    "format": ("output", "format"),
    "out": ("output", "path"),
    "precision": ("output", "precision"),
    "blocks_csv": ("output", "blocks_csv"),
}
_TOP_FLAGS = ("alpha", "n")
_SKIP = {"command", "config", "func"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config!r}: {exc}") from exc
        base = RunConfig.from_dict(data)
    base.subcommand = args.command
    for name, value in vars(args).items():
        if name in _SKIP or value is None:
            continue
        if name in _TOP_FLAGS:
            setattr(base, name, value)
        elif name in _BLOCK_FLAGS:
            block, attr = _BLOCK_FLAGS[name]
            setattr(getattr(base, block), attr, value)
        else:
            base.options[name] = value
    if base.sampler.burn_in is None:
        base.sampler.burn_in = base.sampler.steps // 10
    if base.output.format not in ("json", "csv"):
        raise ConfigError("format must be 'json' or 'csv'")
    return base


# ---------------------------------------------------------------- output


def _num(x, precision: Optional[int]):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return ""
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, f".{precision}g") if precision else repr(x)
    return x


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else x.numerator
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return None if not math.isfinite(x) else x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def render_json(cfg: RunConfig, payload: dict) -> str:
    return json.dumps(_jsonable({"config": cfg.as_dict(), **payload}), indent=2, sort_keys=False, allow_nan=False) + "\n"


def render_csv(cfg: RunConfig, header: list, rows: list, notes: Optional[dict] = None) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_jsonable(cfg.as_dict()), sort_keys=False) + "\n")
    for key, value in (notes or {}).items():
        buf.write(f"# {key}: {json.dumps(_jsonable(value))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    p = cfg.output.precision
    for row in rows:
        w.writerow([_num(v, p) for v in row])
    return buf.getvalue()


def read_config_echo(text: str) -> RunConfig:
    """Recover the effective config from a JSON output or a CSV header."""
    if text.startswith("# config: "):
        line = text.splitlines()[0][len("# config: "):]
        return RunConfig.from_dict(json.loads(line))
    return RunConfig.from_dict(json.loads(text)["config"])


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output.path:
        with open(cfg.output.path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- builders


def _parse_alpha(text: str, allow_real: bool = False):
    try:
        return StatisticsParameter.parse(str(text))
    except InvalidInput:
        if not allow_real:
            raise
        try:
            return float(text)
        except ValueError:
            raise InvalidInput(f"cannot parse alpha {text!r} as integer/integer or a real number") from None


def _setting(cfg: RunConfig) -> trialstate.Setting:
    s = cfg.setting
    return trialstate.Setting(s.kind, s.mass, s.omega, s.box_side, s.flux_radius)


def _trial_spec(cfg: RunConfig) -> trialstate.TrialStateSpec:
    return trialstate.TrialStateSpec(
        _parse_alpha(cfg.alpha), cfg.n, _setting(cfg), basis_kind=cfg.options.get("basis"), branch=cfg.options.get("branch")
    )


def _regulator(cfg: RunConfig, spec: trialstate.TrialStateSpec) -> regulators.RegulatorSpec:
    r = cfg.regulator
    profile = regulators.hard_core_profile(r.c, r.s, r.r0)
    return regulators.RegulatorSpec(
        r.family, alpha=spec.alpha_value, nu=spec.nu, r0=r.r0, profile=profile, boundary=r.boundary, box_side=cfg.setting.box_side
    )


def _model(cfg: RunConfig, r0: Optional[float] = None) -> vmc.Model:
    if cfg.options.get("oracle_state"):
        a = float(_parse_alpha(cfg.alpha, allow_real=True))
        if cfg.n != 2:
            raise ConfigError("--oracle-state is the exact two-anyon state and needs --n 2")
        return vmc.oracle_model(a, cfg.setting.mass, cfg.setting.omega)
    if r0 is not None:
        cfg.regulator.r0 = r0
    spec = _trial_spec(cfg)
    return vmc.build_model(spec, _regulator(cfg, spec), cfg.sampler.estimator)


def _sampler_kwargs(cfg: RunConfig) -> dict:
    s = cfg.sampler
    return dict(
        steps=s.steps, burn_in=s.burn_in, seed=s.seed, n_chains=s.chains, walkers=s.walkers,
        measure_every=s.measure_every, threads=1 if s.deterministic else s.threads,
    )


# ---------------------------------------------------------------- commands


def cmd_fractionality(cfg: RunConfig) -> int:
    if cfg.options.get("sweep"):
        q_max = int(cfg.options.get("q_max") or 24)
        a_max = Fraction(str(cfg.options.get("alpha_max") or 1))
        seen = set()
        for q in range(1, q_max + 1):
            for p in range(0, int(a_max * q) + 1):
                seen.add(Fraction(p, q))
        grid = sorted(seen)
        rows = []
        for a in grid:
            s = alpha_star(a)
            rows.append([a, float(a), s, float(s), bessel_deriv_first_zero(float(s))])
        header = ["alpha", "alpha_float", "alpha_star", "alpha_star_float", "jprime_alpha_star"]
        result = {"rows": [dict(zip(header, r)) for r in rows]}
    else:
        a = _parse_alpha(cfg.alpha)
        n_max = int(cfg.options.get("n_max") or 10)
        if n_max < 2:
            raise ConfigError("--n-max must be >= 2")
        s = alpha_star(a)
        js = bessel_deriv_first_zero(float(s))
        rows = []
        for n in range(2, n_max + 1):
            an = alpha_fractionality(a, n)
            rows.append([n, an, float(an), s, js])
        header = ["n", "alpha_n", "alpha_n_float", "alpha_star", "jprime_alpha_star"]
        result = {"rows": [dict(zip(header, r)) for r in rows], "alpha_star": s, "jprime_alpha_star": js}
    if cfg.output.format == "csv":
        _emit(cfg, render_csv(cfg, header, rows))
    else:
        _emit(cfg, render_json(cfg, {"result": result}))
    return EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    a = _parse_alpha(cfg.alpha, allow_real=True)
    o = cfg.options
    s = cfg.setting
    n = cfg.n
    rows = []
    missing = []
    inputs = BoundInputs(omega=s.omega, mass=s.mass, n_particles=n, angular_momentum=o.get("L"))
    consts = BoundConstants(c1=o.get("c1"), c2=o.get("c2") or BoundConstants().c2)
    rows.append(["bosonic", s.omega * n, "omega N", "non-interacting bosons in the trap"])
    rows.append(["harmonic_lower", harmonic_lower_bound(a, inputs, consts), "C1 j'_{alpha_N} omega N^{3/2}", f"C1 = {consts.lower!r}"])
    rows.append(["harmonic_upper", harmonic_upper_bound(inputs, consts), "C2 omega N^{3/2}", f"C2 = {consts.c2!r}"])
    if o.get("L") is None:
        missing.append("L")
    else:
        rows.append(["cs", cs_bound(a, inputs), "omega (N + |L + alpha N(N-1)/2|)", "fixed angular momentum"])
    rows.append(["average_field", average_field_energy(a, inputs), "sqrt(8)/3 sqrt|alpha| omega N^{3/2}", "mean-field flux"])
    density, radius = o.get("density"), s.flux_radius
    if density is None or not radius > 0:
        missing += [k for k, v in (("density", density), ("R", radius if radius > 0 else None)) if v is None]
    else:
        gamma = radius * math.sqrt(density)
        g = gas_bound_asymptotics(a, gamma)
        note = f"gamma = {gamma!r}; regime {g.regime}" + ("; dilute branch undefined at gamma = 1" if g.flagged else "")
        if g.dilute is not None:
            rows.append(["gas_dilute", g.dilute, "2 pi / |ln gamma| + pi j'_{alpha_*}^2", note])
        rows.append(["gas_dense", g.dense, "2 pi |alpha|", note])
    header = ["bound", "value", "source", "convention"]
    if cfg.output.format == "csv":
        _emit(cfg, render_csv(cfg, header, rows, {"missing": missing}))
    else:
        _emit(cfg, render_json(cfg, {"result": [dict(zip(header, r)) for r in rows], "missing": missing}))
    return EXIT_OK


def _verify_eigen(cfg, rng, cases):
    spec = _trial_spec(cfg)
    configs = energy.random_configurations(rng, cfg.n, cases, min_pair=cfg.options.get("min_pair") or 0.3)
    res = energy.verify_singular_eigen(spec, configs, step=cfg.options.get("step"), tol=cfg.options.get("tol") or 1e-5)
    return res.values, res.tolerance, {"eigenvalue": energy.singular_eigenvalue(spec)}


def _verify_pauli(cfg, rng, cases):
    a = float(_parse_alpha(cfg.alpha, allow_real=True))
    radius = cfg.setting.flux_radius or 0.5
    factor = energy.pauli_factor(cfg.options.get("factor") or "vandermonde", int(cfg.options.get("power") or 2), anti=True)
    configs = energy.random_configurations(rng, cfg.n, cases, min_pair=0.1 * radius, scale=radius, avoid_radius=radius)
    res = energy.verify_pauli_identity(factor, configs, a, radius, sign=+1, tol=cfg.options.get("tol") or 1e-5)
    overlap = int(np.sum(energy.big_w(configs, radius) > 0))
    return res.values, res.tolerance, {"radius": radius, "overlapping_cases": overlap}


def _cluster_args(cfg):
    o = cfg.options
    if o.get("mu") is not None and o.get("nu") is not None:
        mu, nu = int(o["mu"]), int(o["nu"])
    else:
        a = _parse_alpha(cfg.alpha)
        mu, nu = a.mu, a.nu
    k = int(o["k"]) if o.get("k") is not None else cfg.n // nu
    return clustering.ClusterPolySpec(mu, nu, k)


def _rational_points(rng, count, denom=7, span=3):
    return [(Fraction(int(rng.integers(-span * denom, span * denom + 1)), denom), Fraction(int(rng.integers(-span * denom, span * denom + 1)), denom)) for _ in range(count)]


def _verify_clustering(cfg, rng, cases, which):
    spec = _cluster_args(cfg)
    exact = bool(cfg.options.get("exact"))
    vals = []
    for _ in range(cases):
        if which == "clustering":
            if exact:
                pts = _rational_points(rng, spec.n - spec.nu + 1)
                vals.append(float(clustering.verify_clustering_identity(spec, pts[0], pts[1:], exact=True)))
            else:
                pts = rng.normal(size=spec.n - spec.nu + 1) + 1j * rng.normal(size=spec.n - spec.nu + 1)
                vals.append(float(clustering.verify_clustering_identity(spec, pts[0], pts[1:])))
        else:
            if exact:
                vals.append(float(clustering.verify_laughlin_collapse(spec, _rational_points(rng, spec.k_per_color), exact=True)))
            else:
                c = rng.normal(size=spec.k_per_color) + 1j * rng.normal(size=spec.k_per_color)
                vals.append(float(clustering.verify_laughlin_collapse(spec, c)))
    tol = 0.0 if exact else (cfg.options.get("tol") or 1e-10)
    return np.array(vals), tol, {"mu": spec.mu, "nu": spec.nu, "k": spec.k_per_color, "exact": exact,
                                 "colorings": clustering.coloring_count(spec.n, spec.nu)}


def _verify_current(cfg, rng, cases):
    spec = _trial_spec(cfg)
    configs = energy.random_configurations(rng, cfg.n, cases)
    res = energy.current_divergence_check(spec, configs, tol=cfg.options.get("tol") or 1e-4)
    return res.values, res.tolerance, {}


def _verify_gradients(cfg, rng, cases):
    spec = _trial_spec(cfg)
    reg = _regulator(cfg, spec)
    configs = energy.random_configurations(rng, cfg.n, cases)
    if reg.boundary:
        configs = cfg.setting.box_side * (0.2 + 0.6 * rng.random((cases, cfg.n)) + 1j * (0.2 + 0.6 * rng.random((cases, cfg.n))))
    g = regulators.grad_log_phi(reg, configs)
    fd = regulators.grad_phi_fd(reg, configs, step=1e-6)
    scale = np.maximum(np.max(np.abs(g), axis=-1), 1.0)
    return np.max(np.abs(g - fd), axis=-1) / scale, cfg.options.get("tol") or 1e-6, {"family": reg.family}


def cmd_verify(cfg: RunConfig) -> int:
    which = cfg.options.get("which")
    rng = np.random.default_rng(cfg.sampler.seed)
    cases = int(cfg.options.get("cases") or 20)
    if which == "eigen":
        values, tol, extra = _verify_eigen(cfg, rng, cases)
    elif which == "pauli":
        values, tol, extra = _verify_pauli(cfg, rng, cases)
    elif which in ("clustering", "laughlin"):
        values, tol, extra = _verify_clustering(cfg, rng, cases, which)
    elif which == "current":
        values, tol, extra = _verify_current(cfg, rng, cases)
    elif which == "gradients":
        values, tol, extra = _verify_gradients(cfg, rng, cases)
    else:
        raise ConfigError(f"unknown check {which!r}")
    passed = bool(np.all(values == 0)) if tol == 0 else bool(np.max(values) < tol)
    report = {"check": which, "cases": len(values), "max": float(np.max(values)), "mean": float(np.mean(values)),
              "tolerance": tol, "pass": passed, "residuals": [float(v) for v in values], **extra}
    if cfg.output.format == "csv":
        _emit(cfg, render_csv(cfg, ["case", "residual"], list(enumerate(values)), {"pass": passed, "max": report["max"]}))
    else:
        _emit(cfg, render_json(cfg, {"result": report}))
    return EXIT_OK if passed else EXIT_FAIL


def _estimate_record(cfg: RunConfig, model: vmc.Model, est: vmc.EnergyEstimate) -> dict:
    rec = est.as_dict()
    cs = vmc.check_cs_for_model(est, model)
    rec["cs_bound"] = None if cs is None else {"pass": cs.passed, "threshold": cs.threshold, "margin": cs.margin}
    return rec


def _write_blocks(path: str, est: vmc.EnergyEstimate) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["block", "mean_energy"])
        for i, m in enumerate(est.block_means):
            w.writerow([i, repr(float(m))])


def cmd_energy(cfg: RunConfig) -> int:
    model = _model(cfg)
    t0 = time.perf_counter()
    est = vmc.estimate_energy(model, **_sampler_kwargs(cfg))
    rec = _estimate_record(cfg, model, est)
    payload = {"result": rec}
    if not cfg.sampler.deterministic:
        payload["elapsed_seconds"] = time.perf_counter() - t0
    if cfg.output.blocks_csv:
        _write_blocks(cfg.output.blocks_csv, est)
    if cfg.output.format == "csv":
        keys = ["mean", "std_error", "n_samples", "acceptance_rate", "autocorrelation_estimate", "valid"]
        _emit(cfg, render_csv(cfg, keys, [[rec[k] for k in keys]], {"flags": rec["flags"], "cs_bound": rec["cs_bound"]}))
    else:
        _emit(cfg, render_json(cfg, payload))
    if not est.valid:
        return EXIT_INVALID
    if rec["cs_bound"] is not None and not rec["cs_bound"]["pass"]:
        return EXIT_FAIL
    return EXIT_OK


def parse_grid(text: str) -> list:
    try:
        start, stop, step = (float(p) for p in str(text).split(":"))
    except ValueError:
        raise ConfigError(f"grid must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise ConfigError(f"empty or inverted grid {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def cmd_scan(cfg: RunConfig) -> int:
    grid = parse_grid(cfg.options.get("grid") or "0.5:3.0:0.5")
    kw = _sampler_kwargs(cfg)
    seed = kw.pop("seed")
    crn = not cfg.options.get("independent_seeds")
    base_cfg = RunConfig.from_dict(cfg.as_dict())
    result = vmc.scan_parameter(lambda r0: _model(RunConfig.from_dict(base_cfg.as_dict()), r0), grid, common_random_numbers=crn, seed=seed, **kw)
    rows = [[r["parameter"], r["mean"], r["std_error"], r["acceptance"], r["valid"]] for r in result.rows()]
    best = result.rows()[result.argmin]
    notes = {"argmin": best["parameter"], "min_mean": best["mean"], "golden_bracket": list(result.bracket)}
    if cfg.output.format == "csv":
        _emit(cfg, render_csv(cfg, ["r0", "mean", "std_error", "acceptance", "valid"], rows, notes))
    else:
        _emit(cfg, render_json(cfg, {"result": {"rows": result.rows(), **notes}}))
    return EXIT_OK


def _parse_points(text: str) -> tuple:
    pts = []
    for chunk in str(text).split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            x, y = (float(v) for v in chunk.split(","))
        except ValueError:
            raise ConfigError(f"bad point {chunk!r}; use x,y;x,y;...") from None
        pts.append(complex(x, y))
    return tuple(pts)


def _map_config(cfg: RunConfig) -> maps.MapConfig:
    o = cfg.options
    res = int(o.get("resolution") or 200)
    if o.get("preset"):
        m = maps.preset(o["preset"], res)
        return maps.MapConfig(cfg.alpha, cfg.n, cfg.regulator.r0, m.fixed, m.half_width, res, m.mode, m.pair_center, m.circle_radius)
    if not o.get("fixed"):
        raise ConfigError("map needs --preset or --fixed")
    return maps.MapConfig(
        cfg.alpha, cfg.n, cfg.regulator.r0, _parse_points(o["fixed"]), float(o.get("window") or 10.0), res,
        o.get("mode") or "single", 0j, o.get("winding_radius"),
    )


def cmd_map(cfg: RunConfig) -> int:
    if cfg.setting.flux_radius > 0 or cfg.setting.kind != "trap":
        raise ConfigError("map supports the trap setting with R = 0")
    mc = _map_config(cfg)
    amap = maps.psi_map(mc)
    notes = {"zero_sites": int(np.sum(np.isneginf(amap.log_abs2)))}
    radius = cfg.options.get("winding_radius") or mc.circle_radius
    if radius:
        notes["winding_radius"] = radius
        notes["winding"] = maps.grid_circle_winding(amap, radius)
        notes["winding_over_pi"] = notes["winding"] / math.pi
    if cfg.output.format == "csv":
        _emit(cfg, render_csv(cfg, ["x", "y", "arg_psi", "log_abs2_psi"], amap.rows(), notes))
    else:
        grid = {"x": amap.x.tolist(), "y": amap.y.tolist(), "arg_psi": amap.arg.tolist(), "log_abs2_psi": amap.log_abs2.tolist()}
        _emit(cfg, render_json(cfg, {"result": {**notes, "grid": grid}}))
    return EXIT_OK


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("global")
    g.add_argument("--config", help="JSON file mirroring the effective config; flags override it")
    g.add_argument("--seed", type=int)
    g.add_argument("--threads", type=int)
    g.add_argument("--deterministic", action="store_const", const=True)
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("--precision", type=int, help="significant digits in CSV (default: shortest round-trip)")


def _physics(p: argparse.ArgumentParser, real_alpha: bool = False) -> None:
    p.add_argument("--alpha", help="statistics parameter mu/nu" + (" or a real number" if real_alpha else ""))
    p.add_argument("--n", type=int, help="number of particles")
    p.add_argument("--setting", choices=("trap", "box"))
    p.add_argument("--mass", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--box-side", type=float)
    p.add_argument("--R", type=float, help="flux radius (0 = point anyons)")


def _regulator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--regulator", help="parametric-r0 (phi-r0), nearest-neighbor (phi-0), bijl-jastrow, dyson, constant")
    p.add_argument("--r0", type=float)
    p.add_argument("--profile-c", type=float)
    p.add_argument("--profile-s", type=float)
    p.add_argument("--boundary", action="store_const", const=True)
    p.add_argument("--basis", choices=("oscillator", "lowest-landau-level", "neumann-box"))


def _sampler_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int, help="post-burn-in steps per chain")
    p.add_argument("--burn-in", type=int)
    p.add_argument("--chains", type=int)
    p.add_argument("--walkers", type=int)
    p.add_argument("--measure-every", type=int)
    p.add_argument("--estimator", choices=("auto", "prop1", "prop3", "fd"))
    p.add_argument("--blocks-csv", help="dump per-block means to this CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anyonvmc", description="Anyonic clustering trial states: identities, bounds and VMC energies.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fractionality", help="alpha_N table, or the alpha_* sweep")
    _common(p)
    p.add_argument("--alpha")
    p.add_argument("--n-max", type=int)
    p.add_argument("--sweep", action="store_const", const=True, help="all reduced fractions up to --q-max")
    p.add_argument("--q-max", type=int)
    p.add_argument("--alpha-max")
    p.set_defaults(func=cmd_fractionality)

    p = sub.add_parser("bounds", help="closed-form energy bounds")
    _common(p)
    _physics(p, real_alpha=True)
    p.add_argument("--L", type=int, help="total angular momentum")
    p.add_argument("--density", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="numerical identity checks")
    _common(p)
    p.add_argument("which", choices=("eigen", "pauli", "clustering", "laughlin", "current", "gradients"))
    _physics(p, real_alpha=True)
    _regulator_flags(p)
    p.add_argument("--cases", type=int)
    p.add_argument("--mu", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--exact", action="store_const", const=True)
    p.add_argument("--step", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--min-pair", type=float)
    p.add_argument("--factor", choices=("one", "monomial", "vandermonde"))
    p.add_argument("--power", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("energy", help="VMC energy estimate")
    _common(p)
    _physics(p, real_alpha=True)
    _regulator_flags(p)
    _sampler_flags(p)
    p.add_argument("--oracle-state", action="store_const", const=True, help="exact two-anyon ground state (N = 2)")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("scan", help="energy over a grid of r0")
    _common(p)
    _physics(p)
    _regulator_flags(p)
    _sampler_flags(p)
    p.add_argument("--grid", help="start:stop:step")
    p.add_argument("--independent-seeds", action="store_const", const=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("map", help="arg Psi and log|Psi|^2 over a window")
    _common(p)
    _physics(p)
    _regulator_flags(p)
    p.add_argument("--preset", help="fig2a..fig2c or fig3a..fig3c")
    p.add_argument("--fixed", help="fixed positions 'x,y;x,y;...'")
    p.add_argument("--mode", choices=("single", "relative"))
    p.add_argument("--window", type=float, help="half-width of the square window")
    p.add_argument("--resolution", type=int)
    p.add_argument("--winding-radius", type=float)
    p.set_defaults(func=cmd_map)
    return parser


_MAP_DEFAULTS = {"alpha": "2/3", "n": 12, "r0": 1.3}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "map" and not args.config:
            cfg.alpha = args.alpha or _MAP_DEFAULTS["alpha"]
            cfg.n = args.n or _MAP_DEFAULTS["n"]
            cfg.regulator.r0 = args.r0 or _MAP_DEFAULTS["r0"]
        return args.func(cfg)
    except (ConfigError, InvalidInput, trialstate.InvalidSpec, clustering.InvalidInput, ValueError) as exc:
        print(f"anyonvmc: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
