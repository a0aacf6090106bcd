"""Clustered angular model: cluster centroid + subray offset per plane.

Azimuth and elevation angles are each the sum of a cluster central angle and
a zero-mean subray offset.  The closed-form interference series consume the
model through its characteristic functions psi(n) = E[exp(j n phi)] and
chi(n) = E[exp(j n theta)]; the Monte Carlo engine consumes it through
``sample_ray_angles``.  All angles are radians internally; the CLI converts
from degrees at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GAUSSIAN = "gaussian"
LAPLACIAN = "laplacian"
UNIFORM = "uniform"

_FAMILIES = (GAUSSIAN, LAPLACIAN, UNIFORM)


@dataclass(frozen=True)
class MarginalDistribution:
    """One angular marginal: Gaussian/Laplacian (mean, variance) or a uniform interval."""

    family: str
    mean: float = 0.0
    variance: float = 0.0
    low: float = 0.0
    high: float = 0.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == UNIFORM:
            if not self.low < self.high:
                raise ValueError("uniform interval needs low < high")
        elif self.variance < 0:
            raise ValueError("variance must be nonnegative")

    @staticmethod
    def gaussian(mean: float, variance: float) -> "MarginalDistribution":
        return MarginalDistribution(GAUSSIAN, mean=mean, variance=variance)

    @staticmethod
    def laplacian(mean: float, variance: float) -> "MarginalDistribution":
        return MarginalDistribution(LAPLACIAN, mean=mean, variance=variance)

    @staticmethod
    def uniform(low: float, high: float) -> "MarginalDistribution":
        return MarginalDistribution(UNIFORM, low=low, high=high)

    def sample(self, size, rng: np.random.Generator) -> np.ndarray:
        if self.family == GAUSSIAN:
            if self.variance == 0.0:
                return np.full(size, self.mean)
            return rng.normal(self.mean, np.sqrt(self.variance), size)
        if self.family == LAPLACIAN:
            if self.variance == 0.0:
                return np.full(size, self.mean)
            return rng.laplace(self.mean, np.sqrt(self.variance / 2.0), size)
        return rng.uniform(self.low, self.high, size)


def cf_marginal(dist: MarginalDistribution, n) -> complex | np.ndarray:
    """Characteristic function E[exp(j n X)] at integer (or real) n.

    Gaussian: exp(j n mu - n^2 sigma^2 / 2).  Laplacian with variance
    sigma^2: exp(j n mu) / (1 + n^2 sigma^2 / 2).  Uniform[a, b]:
    (exp(j n b) - exp(j n a)) / (j n (b - a)), with the n = 0 limit 1.
    """
    n = np.asarray(n, dtype=float)
    if dist.family == GAUSSIAN:
        out = np.exp(1j * n * dist.mean - 0.5 * n * n * dist.variance)
    elif dist.family == LAPLACIAN:
        out = np.exp(1j * n * dist.mean) / (1.0 + 0.5 * n * n * dist.variance)
    else:
        a, b = dist.low, dist.high
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (np.exp(1j * n * b) - np.exp(1j * n * a)) / (1j * n * (b - a))
        out = np.where(n == 0.0, 1.0 + 0.0j, out)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class AngularModel:
    """Composite cluster + subray distributions for azimuth and elevation."""

    azimuth_cluster: MarginalDistribution
    azimuth_subray: MarginalDistribution
    elevation_cluster: MarginalDistribution
    elevation_subray: MarginalDistribution

    def __post_init__(self):
        for sub in (self.azimuth_subray, self.elevation_subray):
            if sub.family != UNIFORM and sub.mean != 0.0:
                raise ValueError("subray offsets must have zero mean")
            if sub.family == UNIFORM and abs(sub.low + sub.high) > 1e-12:
                raise ValueError("uniform subray offsets must be centred on zero")


def composite_cf(plane: str, model: AngularModel, n) -> complex | np.ndarray:
    """CF of the composite angle: product of cluster and subray CFs."""
    if plane == "azimuth":
        return cf_marginal(model.azimuth_cluster, n) * cf_marginal(model.azimuth_subray, n)
    if plane == "elevation":
        return cf_marginal(model.elevation_cluster, n) * cf_marginal(model.elevation_subray, n)
    raise ValueError("plane must be 'azimuth' or 'elevation'")


def _wrap_azimuth(phi: np.ndarray) -> np.ndarray:
    return np.mod(phi + np.pi, 2.0 * np.pi) - np.pi


def sample_composite_angles(model: AngularModel, n: int, rng: np.random.Generator):
    """Draw n independent (phi, theta) composite ray angles.

    Azimuth is wrapped to [-pi, pi]; elevation samples outside [0, pi] are
    rejected and redrawn (fresh cluster + offset) to avoid point masses at
    the poles.
    """
    phi = _wrap_azimuth(model.azimuth_cluster.sample(n, rng)
                        + model.azimuth_subray.sample(n, rng))
    theta = model.elevation_cluster.sample(n, rng) + model.elevation_subray.sample(n, rng)
    for _ in range(200):
        bad = (theta < 0.0) | (theta > np.pi)
        if not bad.any():
            break
        k = int(bad.sum())
        theta[bad] = (model.elevation_cluster.sample(k, rng)
                      + model.elevation_subray.sample(k, rng))
    else:
        raise RuntimeError("elevation rejection sampling failed to converge")
    return phi, theta


def sample_ray_angles(model: AngularModel, clusters: int, subrays: int,
                      rng: np.random.Generator):
    """Draw C cluster centroids and S offsets per cluster, per plane.

    Returns (phi, theta), each shaped (clusters, subrays).  Azimuth wrapped
    to [-pi, pi]; out-of-range elevations get a fresh subray offset (then a
    fresh centroid if the offset alone cannot fix it).
    """
    if clusters < 1 or subrays < 1:
        raise ValueError("cluster and subray counts must be >= 1")
    phi_c = model.azimuth_cluster.sample(clusters, rng)
    theta_c = model.elevation_cluster.sample(clusters, rng)
    phi = _wrap_azimuth(phi_c[:, None] + model.azimuth_subray.sample((clusters, subrays), rng))
    theta = theta_c[:, None] + model.elevation_subray.sample((clusters, subrays), rng)
    for attempt in range(400):
        bad = (theta < 0.0) | (theta > np.pi)
        if not bad.any():
            break
        if attempt == 100:
            # centroid itself is (pathologically) out of range: redraw rows
            rows = bad.any(axis=1)
            theta_c = np.where(rows, model.elevation_cluster.sample(clusters, rng), theta_c)
        redraw = theta_c[:, None] + model.elevation_subray.sample((clusters, subrays), rng)
        theta[bad] = redraw[bad]
    else:
        raise RuntimeError("elevation rejection sampling failed to converge")
    return phi, theta


def measured_model() -> AngularModel:
    """Measured urban macro angular spreads (degrees: az 14.4/6.24, el 1.9/1.37).

    Gaussian azimuth clusters at 0 deg, Laplacian elevation clusters at
    90 deg, Laplacian subray offsets in both planes.
    """
    d = np.deg2rad
    return AngularModel(
        azimuth_cluster=MarginalDistribution.gaussian(0.0, d(14.4) ** 2),
        azimuth_subray=MarginalDistribution.laplacian(0.0, d(6.24) ** 2),
        elevation_cluster=MarginalDistribution.laplacian(d(90.0), d(1.9) ** 2),
        elevation_subray=MarginalDistribution.laplacian(0.0, d(1.37) ** 2),
    )


def uniform_model() -> AngularModel:
    """Baseline with azimuth and elevation uniform on [-pi, pi]."""
    return AngularModel(
        azimuth_cluster=MarginalDistribution.uniform(-np.pi, np.pi),
        azimuth_subray=MarginalDistribution.gaussian(0.0, 0.0),
        elevation_cluster=MarginalDistribution.uniform(-np.pi, np.pi),
        elevation_subray=MarginalDistribution.gaussian(0.0, 0.0),
    )
