import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from anyonvmc.basis import OneBodyBasis, slater_log
from anyonvmc.regulators import RegulatorSpec, log_phi
from anyonvmc.trialstate import (
    Configuration,
    InvalidSpec,
    Setting,
    Singularity,
    TrialState,
    TrialStateSpec,
    angular_momentum,
    angular_momentum_forms,
    confinement_log,
    eval_psi_even,
    eval_psi_odd,
    gauge_log,
    gauge_transform,
    jastrow_log,
    state_degree,
    w_radius,
)


def _phase_diff(a, b):
    return np.abs((np.asarray(a) - np.asarray(b) + np.pi) % (2 * np.pi) - np.pi)


def _cplx(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def test_jastrow_examples():
    assert jastrow_log(np.array([0, 1 + 0j]), 0.7) == 0
    r = 0.8
    got = jastrow_log(np.array([0, r / 2 + 0j]), 0.7, radius=r)
    assert abs(got - (-0.7 * (math.log(r) - 3 / 8))) < 1e-14
    with pytest.raises(Singularity):
        jastrow_log(np.array([0.5, 0.5 + 0j]), 0.7)


def test_w_radius_c1_at_boundary():
    r, h = 0.7, 1e-7
    inner, outer = w_radius(np.array([r - h, r]), r), w_radius(np.array([r, r + h]), r)
    assert abs(w_radius(r, r) - math.log(r)) < 1e-12
    assert abs((inner[1] - inner[0]) / h - 1 / r) < 1e-6
    assert abs((outer[1] - outer[0]) / h - 1 / r) < 1e-6
    # interior derivative r/R^2 meets 1/r exactly at r = R
    assert abs(r / r ** 2 - 1 / r) < 1e-12


def test_gauge_transform_examples(rng):
    z = _cplx(rng, 5)
    g0 = gauge_transform(z, 0)
    assert g0.log_mag == 0 and g0.phase == 0
    g = gauge_transform(z, 3)
    assert abs(abs(g.to_complex()) - 1) < 1e-14
    with pytest.raises(Singularity):
        gauge_transform(np.array([0, 0, 1j]), 1)


def test_gauge_square_keeps_symmetry(rng):
    z = _cplx(rng, 4)
    sym = lambda p: np.sum(np.abs(p) ** 2) + np.prod(p)
    a = gauge_log(z, -2) + np.log(sym(z))
    b = gauge_log(z[[1, 0, 2, 3]], -2) + np.log(sym(z[[1, 0, 2, 3]]))
    assert _phase_diff(a.imag, b.imag) < 1e-12


def test_even_alpha_zero_is_product_of_ground_states(rng):
    z = _cplx(rng, 4)
    spec = TrialStateSpec(0, 4)
    assert abs(TrialState(spec)(z) - confinement_log(z, spec.setting)) < 1e-13


def test_even_k1_is_jastrow_times_ground_states(rng):
    z = _cplx(rng, 3)
    spec = TrialStateSpec("2/3", 3)
    expected = -(2 / 3) * sum(math.log(abs(z[a] - z[b])) for a, b in [(0, 1), (0, 2), (1, 2)]) + confinement_log(z, spec.setting)
    assert abs(eval_psi_even(spec, Configuration(z)).clog - expected) < 1e-13


def test_even_rejects_diagonal():
    with pytest.raises(Singularity):
        eval_psi_even(TrialStateSpec("2/3", 3), np.array([0, 0, 1j]))


SPECS = [
    TrialStateSpec("2/3", 6),
    TrialStateSpec("2/3", 9),
    TrialStateSpec("2/5", 5),
    TrialStateSpec("4/3", 6),
    TrialStateSpec("2/3", 6, Setting("box", box_side=3.0, flux_radius=0.5)),
    TrialStateSpec("1/3", 6),
    TrialStateSpec("1/3", 9),
    TrialStateSpec("1", 4),
    TrialStateSpec("1/2", 4, basis_kind="lowest-landau-level"),
    TrialStateSpec("1/3", 6, Setting("box", box_side=3.0)),
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.alpha}-{s.n_particles}-{s.setting.kind}-{s.basis_kind}")
def test_bosonic_symmetry(spec, rng):
    state = TrialState(spec)
    n = spec.n_particles
    for _ in range(20):
        z = _cplx(rng, n) if spec.setting.kind == "trap" else 3.0 * (rng.uniform(size=n) + 1j * rng.uniform(size=n))
        a, b = state(z), state(z[rng.permutation(n)])
        assert abs(a.real - b.real) < 1e-10 * max(1, abs(a.real))
        assert _phase_diff(a.imag, b.imag) < 1e-10


def test_fermion_case_is_gauged_slater(rng):
    spec = TrialStateSpec("1", 4)
    z = _cplx(rng, 4)
    expected = gauge_log(z, -1) + slater_log(OneBodyBasis().log_values(z, 4))
    got = eval_psi_odd(spec, z).clog
    assert abs(got.real - expected.real) < 1e-12 and _phase_diff(got.imag, expected.imag) < 1e-12


def test_branch_checks():
    with pytest.raises(InvalidSpec):
        TrialStateSpec("1/3", 3, branch="even")
    with pytest.raises(InvalidSpec):
        TrialStateSpec("2/3", 4)
    with pytest.raises(InvalidSpec):
        TrialStateSpec("1/3", 6, strict_magic=True)
    TrialStateSpec("1/3", 9, strict_magic=True)
    with pytest.raises(InvalidSpec):
        eval_psi_odd(TrialStateSpec("2/3", 3), np.zeros(3))


def test_extended_continuity_across_r():
    spec = TrialStateSpec("2/3", 3, Setting(flux_radius=0.5))
    state = TrialState(spec)
    d = 0.5 + np.array([-1e-9, 1e-9])
    z = np.stack([np.array([0, x, 2.0 + 1.0j]) for x in d])
    v = state(z)
    assert np.all(np.isfinite(v.real)) and abs(v[0] - v[1]) < 1e-8
    assert np.isfinite(state(np.array([0.3, 0.3, 1.0j])).real)


@pytest.mark.parametrize("mu,nu", [(2, 1), (2, 3), (4, 3), (8, 3), (2, 5), (6, 5), (4, 1)])
def test_rotation_phase_is_l_theta(mu, nu, rng):
    for k in (1, 2, 3 if nu <= 3 else 2):
        spec = TrialStateSpec(f"{mu}/{nu}", nu * k)
        state = TrialState(spec)
        z = _cplx(rng, nu * k)
        for theta in (0.37, -1.2, 2.9):
            d = state(np.exp(1j * theta) * z) - state(z)
            assert abs(d.real) < 1e-9
            assert _phase_diff(d.imag, float(angular_momentum(spec)) * theta) < 1e-9


@pytest.mark.parametrize("mu", [0, 2, 4, 6])
@pytest.mark.parametrize("nu", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("k", range(1, 7))
def test_angular_momentum_forms_agree(mu, nu, k):
    a, b = angular_momentum_forms(mu, nu, k)
    assert a == b and isinstance(a, Fraction)


def test_angular_momentum_examples():
    assert angular_momentum(TrialStateSpec("2/3", 12)) == -36
    assert angular_momentum(TrialStateSpec("2/3", 6)) == -6
    assert angular_momentum(TrialStateSpec("2/3", 3)) == 0
    assert angular_momentum(TrialStateSpec("1/3", 9)) == -9
    assert angular_momentum(TrialStateSpec("1/2", 4, basis_kind="lowest-landau-level")) == -2 - 2
    with pytest.raises(InvalidSpec):
        angular_momentum(TrialStateSpec("1/3", 6))


def test_state_degree_examples():
    assert state_degree(TrialStateSpec("2/3", 12)) == -8
    deg = state_degree(TrialStateSpec("2/3", 6), with_regulator="nearest-neighbor")
    assert deg == 4
    assert (1 + Fraction(2, 3) * 2 / 2) * 6 == 6 + deg
    assert state_degree(TrialStateSpec("2", 5)) == 0
    with pytest.raises(InvalidSpec):
        state_degree(TrialStateSpec("1/3", 3))


@pytest.mark.parametrize("lam", [1.7, 0.55])
def test_degree_is_homogeneity(lam, rng):
    spec = TrialStateSpec("2/3", 6)
    state = TrialState(spec)
    z = _cplx(rng, 6)
    d = state.jastrow(lam * z) + state.statistical_part(lam * z) - confinement_log(lam * z, spec.setting)
    d -= state.jastrow(z) + state.statistical_part(z) - confinement_log(z, spec.setting)
    assert abs(d.real - float(state_degree(spec)) * math.log(lam)) < 1e-10


def test_short_distance_exponent(rng):
    spec = TrialStateSpec("2/3", 6)
    state = TrialState(spec)
    z = _cplx(rng, 6)
    eps = np.logspace(-4, -2, 9)
    pts = np.repeat(z[None], len(eps), axis=0)
    pts[:, 1] = z[0] + eps * np.exp(0.4j)
    slope = np.polyfit(np.log(eps), state(pts).real, 1)[0]
    assert abs(slope + 2 / 3) < 1e-2


def test_cluster_gauge_limit(rng):
    spec = TrialStateSpec("2/3", 6)
    state = TrialState(spec)
    reg = RegulatorSpec("nearest-neighbor", alpha=2 / 3, nu=3)
    centers = np.array([0.0, 2.0 + 1.0j])
    offsets = _cplx(rng, 6)
    target = gauge_log(centers, -spec.nu * spec.mu).imag
    for scale, tol in ((1e-3, 1e-2), (1e-7, 1e-6)):
        z = np.repeat(centers, 3) + scale * offsets
        psi = state(z) + log_phi(reg, z)
        assert _phase_diff(psi.imag, target) < tol


@given(st.integers(0, 2 ** 31))
def test_gauge_transform_unit_modulus(seed):
    z = _cplx(np.random.default_rng(seed), 5)
    assert abs(gauge_transform(z, -3).log_mag) == 0
