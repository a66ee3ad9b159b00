import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from anyonvmc.energy import random_configurations
from anyonvmc.regulators import (
    FAMILIES,
    PairProfile,
    RegulatorSpec,
    eval_phi,
    grad_log_phi,
    grad_phi,
    grad_phi_fd,
    has_ties,
    hard_core_profile,
    kinetic_weight,
    log_phi,
)

ALL = [
    RegulatorSpec("parametric-r0", alpha=2 / 3, nu=3, r0=1.3),
    RegulatorSpec("nearest-neighbor", alpha=2 / 3, nu=3),
    RegulatorSpec("bijl-jastrow", profile=hard_core_profile(1.0, 2.0, 0.8)),
    RegulatorSpec("dyson", profile=hard_core_profile(1.0, 3.0, 0.5)),
    RegulatorSpec("constant"),
]


def test_aliases_and_validation():
    assert RegulatorSpec("phi-r0").family == "parametric-r0"
    assert RegulatorSpec("phi0").family == "nearest-neighbor"
    with pytest.raises(ValueError):
        RegulatorSpec("gaussian")
    with pytest.raises(ValueError):
        RegulatorSpec("parametric-r0", r0=0.0)
    assert set(FAMILIES) == {s.family for s in ALL}


def test_parametric_pair_at_r0():
    r0, a = 1.3, 2 / 3
    val = log_phi(RegulatorSpec("r0", alpha=a, r0=r0), np.array([0, r0 + 0j]))
    assert abs(val - (2 * a * math.log(r0) - a * math.log(2 * r0 * r0))) < 1e-14


def test_parametric_tends_to_one_far_apart():
    spec = RegulatorSpec("r0", alpha=2 / 3, r0=1.0)
    vals = [log_phi(spec, np.array([0, d + 0j, 2j * d])) for d in (1e2, 1e4, 1e6)]
    assert abs(vals[-1]) < 1e-11 and abs(vals[0]) > abs(vals[1]) > abs(vals[2])


def test_constant_is_one_and_flat(rng):
    z = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
    spec = RegulatorSpec("constant")
    assert np.all(log_phi(spec, z) == 0)
    assert np.all(grad_log_phi(spec, z) == 0)
    assert np.max(np.abs(grad_phi_fd(spec, z))) < 1e-12


def test_coincident_pair_gives_zero():
    z = np.array([0.5, 0.5, 1.0 + 1.0j, -1.0 + 0.2j])
    for spec in ALL[:4]:
        assert np.isneginf(log_phi(spec, z))
        assert eval_phi(spec, z).is_zero


def test_nearest_neighbor_definition(rng):
    z = rng.normal(size=6) + 1j * rng.normal(size=6)
    a = 0.4
    expected = 0.0
    for j in range(6):
        d = sorted(abs(z[j] - z[k]) for k in range(6) if k != j)
        expected += a * (math.log(d[0]) + math.log(d[1]))
    assert abs(log_phi(RegulatorSpec("nn", alpha=a, nu=3), z) - expected) < 1e-12


def test_dyson_definition_in_centroid_order(rng):
    z = rng.normal(size=5) + 1j * rng.normal(size=5)
    prof = hard_core_profile(1.0, 2.0, 0.7)
    order = np.argsort(np.abs(z - z.mean()))
    zo = z[order]
    expected = sum(prof.log_f(min(abs(zo[i] - zo[j]) for j in range(i))) for i in range(1, 5))
    assert abs(log_phi(RegulatorSpec("dyson", profile=prof), z) - expected) < 1e-12


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.family)
def test_exchange_symmetry(spec, rng):
    for _ in range(10):
        z = rng.normal(size=6) + 1j * rng.normal(size=6)
        assert abs(log_phi(spec, z) - log_phi(spec, z[rng.permutation(6)])) < 1e-10


def test_short_distance_exponent():
    spec = RegulatorSpec("r0", alpha=2 / 3, r0=1.0)
    eps = np.logspace(-4, -2, 9)
    z = np.stack([np.array([0.0, e, 2.0 + 1.0j]) for e in eps])
    # Phi * |z_12|^(-alpha) scales like |z_12|^(+alpha)
    slope = np.polyfit(np.log(eps), log_phi(spec, z) - (2 / 3) * np.log(eps), 1)[0]
    # the third particle contributes an O(eps) drift to the fit
    assert abs(slope - 2 / 3) < 1e-3


def test_parametric_two_particle_gradient():
    a, r0 = 0.6, 1.2
    z = np.array([0.3 + 0.4j, -0.5 + 0.1j])
    r2 = abs(z[0] - z[1]) ** 2
    expected = 2 * a * r0 ** 2 / (r2 * (r0 ** 2 + r2)) * (z[0] - z[1])
    spec = RegulatorSpec("r0", alpha=a, r0=r0)
    assert abs(grad_phi(spec, z)[0] - expected) < 1e-14
    assert abs(grad_phi_fd(spec, z)[0] - expected) < 1e-6


@pytest.mark.parametrize("spec", ALL + [RegulatorSpec("r0", alpha=0.5, r0=0.7, boundary=True, box_side=4.0)], ids=lambda s: s.family + ("-box" if s.boundary else ""))
def test_gradient_matches_fd(spec, rng):
    if spec.boundary:
        z = 4.0 * (rng.uniform(0.05, 0.95, size=(50, 4)) + 1j * rng.uniform(0.05, 0.95, size=(50, 4)))
    else:
        z = random_configurations(rng, 5, 50, min_pair=0.3)
    z = z[~has_ties(spec, z)]
    g, fd = grad_log_phi(spec, z), grad_phi_fd(spec, z, step=1e-6)
    # hard-core profiles reach |grad| ~ 1e5, so compare relative to the gradient size
    assert np.max(np.abs(g - fd) / np.maximum(1.0, np.abs(g))) < 1e-5
    kw = kinetic_weight(spec, z)
    assert np.max(np.abs(kw - np.sum(np.abs(fd) ** 2, axis=-1)) / np.maximum(kw, 1)) < 1e-5


def test_fd_richardson_order(rng):
    spec = ALL[0]
    z = random_configurations(rng, 4, 1)[0]
    g = grad_log_phi(spec, z)
    e1 = np.max(np.abs(grad_phi_fd(spec, z, 1e-2) - g))
    e2 = np.max(np.abs(grad_phi_fd(spec, z, 5e-3) - g))
    assert 3.0 < e1 / e2 < 5.0


def test_boundary_factor_vanishes_on_walls():
    spec = RegulatorSpec("constant", boundary=True, box_side=2.0)
    inside = np.array([0.5 + 0.5j, 1.5 + 1.2j])
    assert np.isfinite(log_phi(spec, inside))
    for wall in (0.0 + 0.5j, 2.0 + 0.5j, 0.5 + 0.0j, 0.5 + 2.0j):
        assert np.isneginf(log_phi(spec, np.array([wall, 1.0 + 1.0j])))


def test_ties_flagged():
    z = np.array([0, 1, -1, 3j + 5, 7 + 0j])
    # particle 0 has two neighbors at distance 1: ambiguous for one neighbor, not for two
    assert has_ties(RegulatorSpec("nn", alpha=0.5, nu=2), z)
    assert not has_ties(RegulatorSpec("nn", alpha=0.5, nu=3), z)
    assert not has_ties(RegulatorSpec("nn", alpha=0.5, nu=2), np.array([0, 1, -1.1, 3j + 5, 7 + 0j]))


def test_custom_profile_scaling_invariance(rng):
    # Phi -> c Phi leaves the gradient (and the estimators built on it) unchanged
    base = hard_core_profile(1.0, 2.0, 1.0)
    shifted = PairProfile(lambda r: base.log_f(r) + 0.7, base.dlog_f, "shifted")
    z = random_configurations(rng, 4, 5)
    a, b = RegulatorSpec("bj", profile=base), RegulatorSpec("bj", profile=shifted)
    assert np.allclose(log_phi(b, z) - log_phi(a, z), 0.7 * 6)
    assert np.array_equal(grad_log_phi(a, z), grad_log_phi(b, z))


@given(st.integers(0, 2 ** 31))
def test_regulators_real_positive_off_diagonal(seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=5) + 1j * rng.normal(size=5)
    for spec in ALL:
        v = eval_phi(spec, z)
        assert v.phase == 0 and np.isfinite(v.log_mag)
