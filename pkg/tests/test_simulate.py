import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arraynmi.angular import AngularModel, MarginalDistribution
from arraynmi.geometry import ArrayConfig, TopologyKind
from arraynmi.nmi import nmi_closed_form
from arraynmi.simulate import (PathLossParams, SinrConfig, calibrate_rho,
                               cluster_powers, drop_users, mean_mmse_sinr,
                               mmse_sinr, nmi_monte_carlo, sample_channel)

RHO_MINUS5DB_DEFAULTS = 3437586.367783956   # 10^-0.5 * sqrt(5050)^3.8
MEDIAN_DISTANCE = 71.06335201775947         # sqrt((10^2 + 100^2)/2)
ANNULUS_CDF_AT_50 = 0.24242424242424243


def _zero_variance_broadside():
    return AngularModel(
        azimuth_cluster=MarginalDistribution.gaussian(0.0, 0.0),
        azimuth_subray=MarginalDistribution.gaussian(0.0, 0.0),
        elevation_cluster=MarginalDistribution.gaussian(math.pi / 2, 0.0),
        elevation_subray=MarginalDistribution.gaussian(0.0, 0.0))


# -- user drops -----------------------------------------------------------------

def test_drop_users_gain_formula(rng):
    params = PathLossParams(shadow_sigma_db=0.0)
    d, beta = drop_users(params, 1000, rng)
    assert np.allclose(beta, (d / params.ref_distance) ** -params.exponent)
    assert np.all((d >= params.exclusion_radius) & (d <= params.cell_radius))


def test_drop_users_distance_law(rng):
    params = PathLossParams()
    d, _ = drop_users(params, 1_000_000, rng)
    assert np.median(d) == pytest.approx(MEDIAN_DISTANCE, rel=2e-3)
    assert np.mean(d <= 50.0) == pytest.approx(ANNULUS_CDF_AT_50, abs=0.002)


def test_pathloss_validation():
    with pytest.raises(ValueError):
        PathLossParams(exclusion_radius=0.0)
    with pytest.raises(ValueError):
        PathLossParams(exclusion_radius=200.0)
    with pytest.raises(ValueError):
        PathLossParams(exponent=1.5)


# -- cluster powers ----------------------------------------------------------------

def test_cluster_powers_single_cluster():
    grid = cluster_powers(2.0, 1, 4)
    assert grid.shape == (1, 4)
    assert grid.sum() == pytest.approx(2.0, abs=1e-15)


def test_cluster_powers_two_cluster_ratio():
    grid = cluster_powers(1.0, 2, 1, decay_ratio=0.1)
    assert grid[0, 0] == pytest.approx(1.0 / 1.1, abs=1e-14)
    assert grid[1, 0] == pytest.approx(0.1 / 1.1, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(c=st.integers(1, 12), s=st.integers(1, 20),
       ratio=st.floats(0.01, 1.0), beta=st.floats(1e-8, 10.0))
def test_cluster_powers_normalization(c, s, ratio, beta):
    grid = cluster_powers(beta, c, s, ratio)
    assert grid.shape == (c, s)
    assert abs(grid.sum() - beta) <= 1e-12 * max(beta, 1.0)
    # equal split within a cluster
    assert np.allclose(grid, grid[:, :1])


# -- ray channels -------------------------------------------------------------------

def test_sample_channel_zero_variance_broadside(rng):
    cfg = ArrayConfig.ula(8, 0.5)
    ch = sample_channel(cfg, _zero_variance_broadside(), 1.0, 1, 1, rng)
    # single broadside ray: common phase times the all-ones steering vector
    assert np.allclose(np.abs(ch.h), 1.0, atol=1e-12)
    assert np.linalg.norm(ch.h) ** 2 == pytest.approx(8.0, rel=1e-12)


def test_sample_channel_power_conservation(measured, rng):
    for kind in TopologyKind:
        cfg = ArrayConfig.uniform(kind, 16, 0.5)
        vals = []
        for _ in range(10_000):
            ch = sample_channel(cfg, measured, 2.5, 6, 10, rng)
            vals.append(np.linalg.norm(ch.h) ** 2 / (16 * 2.5))
        vals = np.asarray(vals)
        se = vals.std(ddof=1) / math.sqrt(len(vals))
        assert abs(vals.mean() - 1.0) < 3 * se + 1e-3


def test_sample_channel_determinism(measured):
    cfg = ArrayConfig.ucira(8, 0.5)
    a = sample_channel(cfg, measured, 1.0, 6, 10, np.random.default_rng(5))
    b = sample_channel(cfg, measured, 1.0, 6, 10, np.random.default_rng(5))
    assert np.array_equal(a.h, b.h)
    assert a.powers.sum() == pytest.approx(1.0, abs=1e-13)


# -- empirical NMI ---------------------------------------------------------------------

def test_nmi_monte_carlo_single_antenna(measured, rng):
    est, se = nmi_monte_carlo(ArrayConfig.ula(1, 0.0), measured, 100, rng)
    assert est == 1.0 and se == 0.0


def test_nmi_monte_carlo_zero_variance(rng):
    est, se = nmi_monte_carlo(ArrayConfig.ula(4, 0.5),
                              _zero_variance_broadside(), 100, rng)
    assert est == pytest.approx(1.0, abs=1e-12)


def test_nmi_monte_carlo_matches_closed_form(measured, rng):
    cfg = ArrayConfig.ula(16, 0.5)
    ref = nmi_closed_form(cfg, measured).kappa
    est, se = nmi_monte_carlo(cfg, measured, 100_000, rng)
    assert abs(est - ref) < 3 * se


def test_channel_nmi_invariant_to_cluster_structure(measured, rng):
    # E|h1^H h2|^2 / (M^2 b1 b2) should not depend on C, S, powers, phases
    cfg = ArrayConfig.ula(8, 0.5)
    m = cfg.num_antennas
    ref = nmi_closed_form(cfg, measured).kappa
    for c, s in [(1, 1), (6, 10)]:
        vals = []
        for _ in range(3000):
            h1 = sample_channel(cfg, measured, 1.0, c, s, rng).h
            h2 = sample_channel(cfg, measured, 1.0, c, s, rng).h
            vals.append(abs(np.vdot(h1, h2)) ** 2 / m ** 2)
        vals = np.asarray(vals)
        se = vals.std(ddof=1) / math.sqrt(len(vals))
        assert abs(vals.mean() - ref) < 3.5 * se


# -- rho calibration --------------------------------------------------------------------

def test_calibrate_rho_frozen_default():
    assert calibrate_rho(PathLossParams(), -5.0) == pytest.approx(
        RHO_MINUS5DB_DEFAULTS, rel=1e-12)


def test_calibrate_rho_scaling():
    base = calibrate_rho(PathLossParams(), -5.0)
    assert calibrate_rho(PathLossParams(attenuation=2.0), -5.0) == pytest.approx(
        base / 2.0, rel=1e-12)
    assert calibrate_rho(PathLossParams(), -2.0) == pytest.approx(
        base * 10 ** 0.3, rel=1e-12)


def test_calibrate_rho_against_mc_median(rng):
    # the analytic median composes per-factor medians; it coincides with the
    # Monte Carlo median of the shadowless link gain
    params = PathLossParams(shadow_sigma_db=0.0)
    _, beta = drop_users(params, 2_000_000, rng)
    assert 10 ** (-0.5) / np.median(beta) == pytest.approx(
        calibrate_rho(params, -5.0), rel=5e-3)


# -- MMSE SINR ----------------------------------------------------------------------------

def test_mmse_sinr_single_user(rng):
    h = rng.normal(size=(6, 1)) + 1j * rng.normal(size=(6, 1))
    rho = 3.7
    assert mmse_sinr(h, 0, rho) == pytest.approx(
        rho * np.linalg.norm(h) ** 2, rel=1e-12)


def test_mmse_sinr_orthogonal_interferer():
    h = np.zeros((4, 2), dtype=complex)
    h[0, 0] = 2.0
    h[1, 1] = 5.0   # orthogonal to user 0
    assert mmse_sinr(h, 0, 1.3) == pytest.approx(1.3 * 4.0, rel=1e-12)


def test_mmse_sinr_two_by_two_hand_case():
    h0 = np.array([1.0 + 1.0j, -0.5j])
    h1 = np.array([0.3 - 0.2j, 0.8 + 0.0j])
    rho = 2.5
    a = np.outer(h1, h1.conj()) + np.eye(2) / rho
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    inv = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / det
    ref = float(np.real(h0.conj() @ inv @ h0))
    got = mmse_sinr(np.column_stack([h0, h1]), 0, rho)
    assert got == pytest.approx(ref, rel=1e-12)


def test_mmse_sinr_monotone_in_interference(rng):
    h = rng.normal(size=(8, 3)) + 1j * rng.normal(size=(8, 3))
    rho = 10.0
    prev = math.inf
    for scale in [0.5, 1.0, 2.0, 5.0]:
        hs = h.copy()
        hs[:, 1] *= scale
        cur = mmse_sinr(hs, 0, rho)
        assert cur <= prev + 1e-12
        prev = cur


def test_mmse_sinr_monotone_in_rho(rng):
    h = rng.normal(size=(8, 4)) + 1j * rng.normal(size=(8, 4))
    vals = [mmse_sinr(h, 2, rho) for rho in [0.1, 1.0, 10.0, 1e3, 1e6]]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(v > 0 for v in vals)


def test_mmse_sinr_include_self_bounded(rng):
    h = rng.normal(size=(8, 4)) + 1j * rng.normal(size=(8, 4))
    assert mmse_sinr(h, 1, 50.0, include_self=True) < 1.0


def test_mmse_sinr_rejects_bad_input(rng):
    h = np.ones((4, 2), dtype=complex)
    h[2, 1] = np.nan
    with pytest.raises(ValueError):
        mmse_sinr(h, 0, 1.0)
    with pytest.raises(ValueError):
        mmse_sinr(np.ones((4, 2), dtype=complex), 0, -1.0)
    with pytest.raises(IndexError):
        mmse_sinr(np.ones((4, 2), dtype=complex), 2, 1.0)


def test_mean_mmse_sinr_runs_and_is_deterministic(measured):
    cfg = ArrayConfig.uniform(TopologyKind.HURA, 16, 0.5)
    path = PathLossParams()
    sinr = SinrConfig(users=4)
    a = mean_mmse_sinr(cfg, measured, path, sinr, 25, np.random.default_rng(3))
    b = mean_mmse_sinr(cfg, measured, path, sinr, 25, np.random.default_rng(3))
    assert a == b
    assert math.isfinite(a[0]) and a[1] >= 0.0 and a[2] > 0.0
