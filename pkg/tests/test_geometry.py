import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arraynmi.geometry import (ArrayConfig, SpaceConstraint, TopologyKind,
                               antenna_positions, footprint_diameter,
                               spacing_under_constraint, steering_matrix,
                               steering_vector, two_ray_interference)

ALL_KINDS = list(TopologyKind)

# frozen arithmetic from the spacing rules
D_FOR_HURA144_HALF = 7.778174593052023      # sqrt(2) * 11 * 0.5
ULA_D_100_777 = 0.07848484848484848         # 7.77 / 99
UCIRA_D_100_777 = 0.17257761099922825       # (7.77/sqrt2) sin(pi/100)
UCIRA_RADIUS_4_HALF = 0.3535533905932738    # 0.5 / (2 sin(pi/4))


def _cfg(kind, m, d):
    return ArrayConfig.uniform(kind, m, d)


def _position_steering(cfg, phi, theta):
    pos = antenna_positions(cfg)
    e = (pos[:, 0] * math.sin(theta) * math.cos(phi)
         + pos[:, 1] * math.sin(theta) * math.sin(phi)
         + pos[:, 2] * math.cos(theta))
    return np.exp(2j * math.pi * e)


# -- positions ---------------------------------------------------------------

def test_ula_positions():
    pos = antenna_positions(ArrayConfig.ula(2, 0.5))
    assert np.allclose(pos, [[0, 0, 0], [0, 0.5, 0]])


def test_ucira_positions():
    pos = antenna_positions(ArrayConfig.ucira(4, 0.5))
    r = UCIRA_RADIUS_4_HALF
    assert np.allclose(pos, [[r, 0, 0], [0, r, 0], [-r, 0, 0], [0, -r, 0]],
                       atol=1e-15)


def test_single_antenna_at_origin():
    for kind in ALL_KINDS:
        pos = antenna_positions(_cfg(kind, 1, 0.0))
        assert pos.shape == (1, 3)
        assert np.allclose(pos, 0.0)
        assert np.allclose(steering_vector(_cfg(kind, 1, 0.0), 0.3, 1.1), [1.0])


def test_planar_kinds_stay_in_plane():
    for kind, m in [(TopologyKind.ULA, 5), (TopologyKind.HURA, 9),
                    (TopologyKind.UCirA, 7)]:
        assert np.all(antenna_positions(_cfg(kind, m, 0.4))[:, 2] == 0.0)


# -- steering vectors ----------------------------------------------------------

def test_broadside_ula_is_all_ones():
    for m in [2, 5, 16]:
        a = steering_vector(ArrayConfig.ula(m, 0.5), 0.0, math.pi / 2)
        assert np.allclose(a, 1.0)


def test_hura_axis_factors():
    cfg = ArrayConfig.hura(2, 2, 0.5, 0.5)
    a = steering_vector(cfg, math.pi / 2, math.pi / 2)
    # a_x = (1, 1), a_y = (1, -1); kron with x slowest
    assert np.allclose(a, [1, -1, 1, -1], atol=1e-12)


def test_ucyla_at_horizon_reduces_to_ucira():
    cyl = ArrayConfig.ucyla(5, 3, 0.5, 0.7)
    cir = ArrayConfig.ucira(5, 0.5)
    a = steering_vector(cyl, 0.9, math.pi / 2)
    b = steering_vector(cir, 0.9, math.pi / 2)
    assert np.allclose(a, np.kron(b, np.ones(3)), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(phi=st.floats(-math.pi, math.pi), theta=st.floats(0.0, math.pi))
def test_unit_modulus(phi, theta):
    for kind in ALL_KINDS:
        a = steering_vector(_cfg(kind, 4, 0.37), phi, theta)
        assert np.allclose(np.abs(a), 1.0, atol=1e-12)


def test_position_consistency_thousand_draws(rng):
    configs = [ArrayConfig.ula(7, 0.5), ArrayConfig.hura(3, 4, 0.4, 0.6),
               ArrayConfig.vura(2, 5, 0.7, 0.3), ArrayConfig.ucira(9, 0.5),
               ArrayConfig.ucyla(4, 3, 0.8, 0.45)]
    phis = rng.uniform(-math.pi, math.pi, 1000)
    thetas = rng.uniform(0.0, math.pi, 1000)
    for cfg in configs:
        mats = steering_matrix(cfg, phis, thetas)
        for i in [0, 137, 512, 999]:
            ref = _position_steering(cfg, phis[i], thetas[i])
            assert np.max(np.abs(mats[:, i] - ref)) < 1e-12
        # full check on moduli and phases for all draws
        pos = antenna_positions(cfg)
        e = (np.outer(pos[:, 0], np.sin(thetas) * np.cos(phis))
             + np.outer(pos[:, 1], np.sin(thetas) * np.sin(phis))
             + np.outer(pos[:, 2], np.cos(thetas)))
        assert np.max(np.abs(mats - np.exp(2j * np.pi * e))) < 1e-12


def test_angle_domain_validation():
    cfg = ArrayConfig.ula(4, 0.5)
    with pytest.raises(ValueError):
        steering_vector(cfg, 3.5, 1.0)
    with pytest.raises(ValueError):
        steering_vector(cfg, 0.0, -0.2)
    with pytest.raises(ValueError):
        steering_vector(cfg, 0.0, 3.3)


def test_reduction_identities(rng):
    phis = rng.uniform(-math.pi, math.pi, 50)
    thetas = rng.uniform(0.0, math.pi, 50)
    pairs = [
        (ArrayConfig.hura(1, 6, 0.0, 0.5), ArrayConfig.ula(6, 0.5)),
        (ArrayConfig.ucyla(6, 1, 0.5, 0.0), ArrayConfig.ucira(6, 0.5)),
        (ArrayConfig.vura(6, 1, 0.5, 0.0), ArrayConfig.ula(6, 0.5)),
    ]
    for a_cfg, b_cfg in pairs:
        a = steering_matrix(a_cfg, phis, thetas)
        b = steering_matrix(b_cfg, phis, thetas)
        assert np.max(np.abs(a - b)) < 1e-12


# -- two-ray interference ------------------------------------------------------

def test_two_ray_equal_angles_peak():
    for kind in ALL_KINDS:
        cfg = _cfg(kind, 9, 0.5)
        raw, norm = two_ray_interference(cfg, 0.4, 1.2, 0.4, 1.2)
        assert raw == pytest.approx(81.0, rel=1e-12)
        assert norm == pytest.approx(1.0, rel=1e-12)


def test_two_ray_ula_handvalue():
    # second ray at sin(th) sin(ph) = 1/2: a^H a' = 1 + e^{j pi/2}, |.|^2 = 2
    cfg = ArrayConfig.ula(2, 0.5)
    raw, norm = two_ray_interference(cfg, 0.0, math.pi / 2, math.pi / 6, math.pi / 2)
    assert raw == pytest.approx(2.0, abs=1e-12)
    assert norm == pytest.approx(0.5, abs=1e-13)


@settings(max_examples=40, deadline=None)
@given(phi1=st.floats(-3.1, 3.1), theta1=st.floats(0.0, 3.1),
       phi2=st.floats(-3.1, 3.1), theta2=st.floats(0.0, 3.1))
def test_two_ray_symmetry(phi1, theta1, phi2, theta2):
    cfg = ArrayConfig.hura(2, 3, 0.5, 0.5)
    a = two_ray_interference(cfg, phi1, theta1, phi2, theta2)
    b = two_ray_interference(cfg, phi2, theta2, phi1, theta1)
    assert a[0] == pytest.approx(b[0], rel=1e-11, abs=1e-11)


def test_vertical_kinds_resolve_elevation_faster():
    # a few degrees of elevation offset: vertical topologies drop much lower
    off = math.radians(4.0)
    vals = {}
    for kind in ALL_KINDS:
        d = spacing_under_constraint(kind, 100, 7.77)
        _, vals[kind] = two_ray_interference(
            _cfg(kind, 100, d), 0.0, math.pi / 2, 0.0, math.pi / 2 + off)
    assert max(vals[TopologyKind.VURA], vals[TopologyKind.UCylA]) < min(
        vals[TopologyKind.ULA], vals[TopologyKind.HURA], vals[TopologyKind.UCirA])


# -- spacing under constraint ---------------------------------------------------

def test_spacing_frozen_values():
    assert spacing_under_constraint(TopologyKind.ULA, 100, 7.77) == pytest.approx(
        ULA_D_100_777, abs=1e-15)
    assert spacing_under_constraint(TopologyKind.UCirA, 100, 7.77) == pytest.approx(
        UCIRA_D_100_777, abs=1e-15)
    # a 144-antenna half-wavelength HURA has diagonal sqrt(2)*11*0.5
    assert spacing_under_constraint(
        TopologyKind.HURA, 144, D_FOR_HURA144_HALF) == pytest.approx(0.5, abs=1e-12)


def test_spacing_errors():
    with pytest.raises(ValueError):
        spacing_under_constraint(TopologyKind.HURA, 10, 7.77)   # not a square
    with pytest.raises(ValueError):
        spacing_under_constraint(TopologyKind.ULA, 1, 7.77)
    with pytest.raises(ValueError):
        spacing_under_constraint(TopologyKind.ULA, 10, -1.0)


@pytest.mark.parametrize("kind", ALL_KINDS)
@pytest.mark.parametrize("m", [4, 16, 100])
@pytest.mark.parametrize("diag", [2.0, 7.77, 31.08])
def test_footprint_fits_constraint(kind, m, diag):
    d = spacing_under_constraint(kind, m, diag)
    cfg = _cfg(kind, m, d)
    assert footprint_diameter(cfg) <= diag + 1e-9
    assert SpaceConstraint(diag).side == pytest.approx(diag / math.sqrt(2))


def test_config_validation():
    with pytest.raises(ValueError):
        ArrayConfig(TopologyKind.ULA, m_y=4, d_y=0.0)       # spacing needed
    with pytest.raises(ValueError):
        ArrayConfig(TopologyKind.ULA, m_y=4, m_x=2, d_y=0.5)  # unused axis
    with pytest.raises(ValueError):
        ArrayConfig(TopologyKind.HURA, m_x=0, m_y=4, d_y=0.5)
    with pytest.raises(ValueError):
        ArrayConfig.uniform(TopologyKind.UCylA, 12, 0.5)    # non-square
