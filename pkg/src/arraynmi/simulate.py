"""Monte Carlo engine: user drops, ray-based channels, empirical NMI, MMSE SINR.

Users fall area-uniformly in an annulus [r0, r]; the link gain is
beta = A * X * (d/d0)^-Gamma with lognormal shadowing X.  A channel is a sum
of C*S rays, each a steering vector scaled by sqrt(power) and a uniform
phase; ray powers split the link gain across exponentially decaying cluster
powers.  All randomness flows through caller-provided numpy Generators so
runs are reproducible sample by sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .angular import AngularModel, sample_composite_angles, sample_ray_angles
from .geometry import ArrayConfig, steering_matrix


@dataclass(frozen=True)
class PathLossParams:
    """Classical path loss and shadowing: beta = A * X * (d/d0)^-Gamma."""

    attenuation: float = 1.0          # unitless average attenuation at d0
    exponent: float = 3.8             # path-loss exponent Gamma
    shadow_sigma_db: float = 5.5      # std dev of 10*log10(X)
    ref_distance: float = 1.0         # d0, meters
    cell_radius: float = 100.0        # r, meters
    exclusion_radius: float = 10.0    # r0, meters

    def __post_init__(self):
        if not 0 < self.exclusion_radius < self.cell_radius:
            raise ValueError("need 0 < exclusion_radius < cell_radius")
        if self.exponent <= 2.0:
            raise ValueError("path-loss exponent must exceed 2")
        if self.shadow_sigma_db < 0 or self.ref_distance <= 0 or self.attenuation <= 0:
            raise ValueError("invalid path-loss parameters")


@dataclass(frozen=True)
class SinrConfig:
    """Uplink MMSE simulation settings."""

    users: int = 4
    rho: float | None = None              # linear uplink SNR; None -> calibrate
    target_median_rx_snr_db: float = -5.0
    include_self: bool = False            # keep own column inside the inverse

    def __post_init__(self):
        if self.users < 1:
            raise ValueError("need at least one user")
        if self.rho is not None and self.rho <= 0:
            raise ValueError("rho must be positive")


@dataclass(frozen=True)
class RayChannel:
    """One user's ray set and the assembled channel vector."""

    powers: np.ndarray      # (C, S) linear ray powers, sums to link_gain
    phases: np.ndarray      # (C, S) in [0, 2pi)
    aaoa: np.ndarray        # (C, S) azimuth angles of arrival
    eaoa: np.ndarray        # (C, S) elevation angles of arrival
    link_gain: float
    h: np.ndarray           # (M,) complex channel


def drop_users(params: PathLossParams, num_users: int, rng: np.random.Generator):
    """Distances (area-uniform on the annulus) and shadowed link gains.

    Returns (distances, gains), each of length num_users.
    """
    r0, r = params.exclusion_radius, params.cell_radius
    d = np.sqrt(r0 * r0 + (r * r - r0 * r0) * rng.random(num_users))
    shadow_db = rng.normal(0.0, params.shadow_sigma_db, num_users)
    x = 10.0 ** (shadow_db / 10.0)
    beta = params.attenuation * x * (d / params.ref_distance) ** (-params.exponent)
    return d, beta


def cluster_powers(link_gain: float, clusters: int, subrays: int,
                   decay_ratio: float = 0.1) -> np.ndarray:
    """(C, S) ray powers: geometric cluster decay, equal split across subrays.

    Cluster c gets power proportional to q**(c-1) with q chosen so the last
    cluster is decay_ratio times the first; the grid sums to link_gain.
    """
    if clusters < 1 or subrays < 1:
        raise ValueError("cluster and subray counts must be >= 1")
    if not 0 < decay_ratio <= 1:
        raise ValueError("decay ratio must lie in (0, 1]")
    if clusters == 1:
        pc = np.array([1.0])
    else:
        q = decay_ratio ** (1.0 / (clusters - 1))
        pc = q ** np.arange(clusters)
        pc /= pc.sum()
    return np.repeat((link_gain * pc / subrays)[:, None], subrays, axis=1)


def sample_channel(cfg: ArrayConfig, model: AngularModel, link_gain: float,
                   clusters: int, subrays: int, rng: np.random.Generator) -> RayChannel:
    """Draw one ray-based channel h = sum sqrt(beta_cs) e^{j Theta} a(phi, theta)."""
    powers = cluster_powers(link_gain, clusters, subrays)
    phases = rng.uniform(0.0, 2.0 * np.pi, (clusters, subrays))
    phi, theta = sample_ray_angles(model, clusters, subrays, rng)
    amps = np.sqrt(powers) * np.exp(1j * phases)
    steer = steering_matrix(cfg, phi.ravel(), theta.ravel())
    h = steer @ amps.ravel()
    return RayChannel(powers=powers, phases=phases, aaoa=phi, eaoa=theta,
                      link_gain=link_gain, h=h)


def nmi_monte_carlo(cfg: ArrayConfig, model: AngularModel, n_samples: int,
                    rng: np.random.Generator, batch: int = 200_000):
    """Empirical NMI: mean of |a(phi,th)^H a(phi',th')|^2 / M^2 over ray pairs.

    Returns (estimate, standard_error).
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    m = cfg.num_antennas
    total = 0.0
    total_sq = 0.0
    left = n_samples
    while left > 0:
        n = min(left, batch)
        p1, t1 = sample_composite_angles(model, n, rng)
        p2, t2 = sample_composite_angles(model, n, rng)
        a1 = steering_matrix(cfg, p1, t1)
        a2 = steering_matrix(cfg, p2, t2)
        x = np.abs(np.sum(a1.conj() * a2, axis=0)) ** 2 / (m * m)
        total += float(x.sum())
        total_sq += float((x * x).sum())
        left -= n
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    return mean, math.sqrt(var / n_samples)


def calibrate_rho(params: PathLossParams, target_median_db: float = -5.0) -> float:
    """Uplink SNR rho making the median received SNR rho*beta hit the target.

    Uses the analytic median of beta: the shadowing median is 1 and the
    area-uniform annulus median distance is sqrt((r0^2 + r^2)/2), so
    median(beta) = A * (sqrt((r0^2+r^2)/2)/d0)^-Gamma.
    """
    med_d = math.sqrt((params.exclusion_radius ** 2 + params.cell_radius ** 2) / 2.0)
    med_beta = params.attenuation * (med_d / params.ref_distance) ** (-params.exponent)
    return 10.0 ** (target_median_db / 10.0) / med_beta


def mmse_sinr(channels: np.ndarray, user: int, rho: float,
              include_self: bool = False) -> float:
    """Post-combining SINR of user `user` with an MMSE receiver.

    channels is M x L with one column per user.  The interference covariance
    uses the other users' columns (plus the own column when include_self is
    set); the Hermitian system is solved by Cholesky factorization with a
    small diagonal jitter retry, never an explicit inverse.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    m, num_users = channels.shape
    if not 0 <= user < num_users:
        raise IndexError("user index out of range")
    h = channels[:, user]
    if not np.all(np.isfinite(channels)):
        raise ValueError("channel matrix contains non-finite entries")
    others = channels if include_self else np.delete(channels, user, axis=1)
    a = others @ others.conj().T + np.eye(m, dtype=complex) / rho
    jitter = 0.0
    for _ in range(4):
        try:
            cho = linalg.cho_factor(a + jitter * np.eye(m), lower=True)
            x = linalg.cho_solve(cho, h)
            break
        except np.linalg.LinAlgError:
            jitter = max(jitter * 100.0, 1e-12 * np.trace(a).real / m)
    else:
        raise np.linalg.LinAlgError("interference covariance not factorizable")
    return float(np.real(np.vdot(h, x)))


def mean_mmse_sinr(cfg: ArrayConfig, model: AngularModel, path: PathLossParams,
                   sinr: SinrConfig, drops: int, rng: np.random.Generator,
                   clusters: int = 6, subrays: int = 10,
                   average: str = "linear"):
    """Cell-wide average MMSE SINR over user drops, reported in dB.

    Each drop places `sinr.users` users with fresh fading; per-user linear
    SINRs are averaged (arithmetically by default, or in dB with
    average="db") and the mean over drops is returned as
    (mean_db, stderr_db, rho).
    """
    rho = sinr.rho if sinr.rho is not None else calibrate_rho(
        path, sinr.target_median_rx_snr_db)
    per_drop = np.empty(drops)
    for i in range(drops):
        _, gains = drop_users(path, sinr.users, rng)
        h = np.column_stack([
            sample_channel(cfg, model, gains[u], clusters, subrays, rng).h
            for u in range(sinr.users)])
        vals = np.array([mmse_sinr(h, u, rho, sinr.include_self)
                         for u in range(sinr.users)])
        if average == "db":
            per_drop[i] = float(np.mean(10.0 * np.log10(vals)))
        else:
            per_drop[i] = float(np.mean(vals))
    if average == "db":
        mean_db = float(np.mean(per_drop))
        se_db = float(np.std(per_drop, ddof=1) / math.sqrt(drops)) if drops > 1 else 0.0
    else:
        mean_lin = float(np.mean(per_drop))
        se_lin = float(np.std(per_drop, ddof=1) / math.sqrt(drops)) if drops > 1 else 0.0
        mean_db = 10.0 * math.log10(mean_lin)
        se_db = 10.0 / math.log(10.0) * se_lin / mean_lin if mean_lin > 0 else 0.0
    return mean_db, se_db, rho
