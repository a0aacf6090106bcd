"""Antenna array topologies: placements, steering vectors, space constraints.

Conventions: azimuth phi is measured from the x-axis in the x-y plane,
elevation theta from the z-axis; broadside is (phi, theta) = (0, pi/2).
Spacings and coordinates are in wavelengths.  Steering vectors are built
from per-axis phase ramps composed with Kronecker products, the left factor
varying slowest; ``antenna_positions`` realizes the same ordering so the
generic position-based phase formula can serve as a cross-check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class TopologyKind(enum.Enum):
    ULA = "ULA"
    HURA = "HURA"
    VURA = "VURA"
    UCirA = "UCirA"
    UCylA = "UCylA"

    def __str__(self):
        return self.value


# kinds whose per-axis split requires an integer sqrt(M)
SQUARE_SPLIT_KINDS = (TopologyKind.HURA, TopologyKind.VURA, TopologyKind.UCylA)


@dataclass(frozen=True)
class SpaceConstraint:
    """Aperture bound: the azimuth footprint must fit a square of diagonal diag."""

    diag: float

    def __post_init__(self):
        if self.diag <= 0:
            raise ValueError("constraint diagonal must be positive")

    @property
    def side(self) -> float:
        return self.diag / math.sqrt(2.0)


@dataclass(frozen=True)
class ArrayConfig:
    """One of the five topologies with per-axis counts and spacings.

    Unused axes keep count 1 and spacing 0.  Axis use per kind:
    ULA m_y; HURA m_x*m_y; VURA m_y*m_z; UCirA m_r; UCylA m_r*m_z.
    """

    kind: TopologyKind
    m_x: int = 1
    m_y: int = 1
    m_z: int = 1
    m_r: int = 1
    d_x: float = 0.0
    d_y: float = 0.0
    d_z: float = 0.0
    d_r: float = 0.0

    def __post_init__(self):
        counts = (self.m_x, self.m_y, self.m_z, self.m_r)
        if any(c < 1 for c in counts):
            raise ValueError("antenna counts must be positive")
        if any(d < 0 for d in (self.d_x, self.d_y, self.d_z, self.d_r)):
            raise ValueError("spacings must be nonnegative")
        used = {
            TopologyKind.ULA: ("m_y",),
            TopologyKind.HURA: ("m_x", "m_y"),
            TopologyKind.VURA: ("m_y", "m_z"),
            TopologyKind.UCirA: ("m_r",),
            TopologyKind.UCylA: ("m_r", "m_z"),
        }[self.kind]
        for name in ("m_x", "m_y", "m_z", "m_r"):
            c = getattr(self, name)
            if name not in used and c != 1:
                raise ValueError(f"{self.kind}: unused axis {name} must be 1")
            if name in used and c > 1:
                d = getattr(self, "d" + name[1:])
                if d <= 0:
                    raise ValueError(f"{self.kind}: axis {name} needs positive spacing")

    @property
    def num_antennas(self) -> int:
        return self.m_x * self.m_y * self.m_z * self.m_r

    # -- constructors --------------------------------------------------------
    @staticmethod
    def ula(m: int, d: float) -> "ArrayConfig":
        return ArrayConfig(TopologyKind.ULA, m_y=m, d_y=d if m > 1 else 0.0)

    @staticmethod
    def hura(m_x: int, m_y: int, d_x: float, d_y: float) -> "ArrayConfig":
        return ArrayConfig(TopologyKind.HURA, m_x=m_x, m_y=m_y,
                           d_x=d_x if m_x > 1 else 0.0, d_y=d_y if m_y > 1 else 0.0)

    @staticmethod
    def vura(m_y: int, m_z: int, d_y: float, d_z: float) -> "ArrayConfig":
        return ArrayConfig(TopologyKind.VURA, m_y=m_y, m_z=m_z,
                           d_y=d_y if m_y > 1 else 0.0, d_z=d_z if m_z > 1 else 0.0)

    @staticmethod
    def ucira(m: int, d_r: float) -> "ArrayConfig":
        return ArrayConfig(TopologyKind.UCirA, m_r=m, d_r=d_r if m > 1 else 0.0)

    @staticmethod
    def ucyla(m_r: int, m_z: int, d_r: float, d_z: float) -> "ArrayConfig":
        return ArrayConfig(TopologyKind.UCylA, m_r=m_r, m_z=m_z,
                           d_r=d_r if m_r > 1 else 0.0, d_z=d_z if m_z > 1 else 0.0)

    @staticmethod
    def uniform(kind: TopologyKind, m: int, d: float) -> "ArrayConfig":
        """Common spacing d on all used axes; square per-axis split where needed."""
        if kind == TopologyKind.ULA:
            return ArrayConfig.ula(m, d)
        if kind == TopologyKind.UCirA:
            return ArrayConfig.ucira(m, d)
        root = math.isqrt(m)
        if root * root != m:
            raise ValueError(f"{kind} needs a perfect-square antenna count, got {m}")
        if kind == TopologyKind.HURA:
            return ArrayConfig.hura(root, root, d, d)
        if kind == TopologyKind.VURA:
            return ArrayConfig.vura(root, root, d, d)
        return ArrayConfig.ucyla(root, root, d, d)

    def circle_radius(self) -> float:
        """Circumscribed radius giving chord length d_r between neighbours."""
        if self.kind not in (TopologyKind.UCirA, TopologyKind.UCylA):
            raise ValueError("circle radius only defined for circular kinds")
        if self.m_r == 1:
            return 0.0
        return self.d_r / (2.0 * math.sin(math.pi / self.m_r))


def spacing_under_constraint(kind: TopologyKind, m: int, diag: float) -> float:
    """Largest uniform spacing keeping the azimuth footprint inside the constraint.

    ULA: D/(M-1);  UCirA: (D/sqrt2) sin(pi/M);  HURA: (D/sqrt2)/(sqrt(M)-1);
    UCylA: (D/sqrt2) sin(pi/sqrt(M));  VURA: D/(sqrt(M)-1).  Linear footprints
    (ULA, VURA) run along the square's diagonal.
    """
    if diag <= 0:
        raise ValueError("constraint diagonal must be positive")
    if m < 2:
        raise ValueError("need at least two antennas for a spacing rule")
    side = diag / math.sqrt(2.0)
    if kind == TopologyKind.ULA:
        return diag / (m - 1)
    if kind == TopologyKind.UCirA:
        return side * math.sin(math.pi / m)
    root = math.isqrt(m)
    if root * root != m:
        raise ValueError(f"{kind} needs a perfect-square antenna count, got {m}")
    if kind == TopologyKind.HURA:
        return side / (root - 1)
    if kind == TopologyKind.UCylA:
        return side * math.sin(math.pi / root)
    if kind == TopologyKind.VURA:
        return diag / (root - 1)
    raise ValueError(f"unknown kind {kind}")


def antenna_positions(cfg: ArrayConfig) -> np.ndarray:
    """(M, 3) coordinates in wavelengths, ordered to match the steering vector.

    Planar kinds (ULA, HURA, UCirA) lie in z = 0.  Circular rings put antenna
    m at angle 2*pi*m/M_r on the circle of radius ``circle_radius``.
    """
    kind = cfg.kind
    if kind == TopologyKind.ULA:
        y = np.arange(cfg.m_y) * cfg.d_y
        return np.column_stack([np.zeros_like(y), y, np.zeros_like(y)])
    if kind == TopologyKind.HURA:
        pts = [( ix * cfg.d_x, iy * cfg.d_y, 0.0)
               for ix in range(cfg.m_x) for iy in range(cfg.m_y)]
        return np.array(pts)
    if kind == TopologyKind.VURA:
        pts = [(0.0, iy * cfg.d_y, iz * cfg.d_z)
               for iy in range(cfg.m_y) for iz in range(cfg.m_z)]
        return np.array(pts)
    r = cfg.circle_radius()
    ang = 2.0 * np.pi * np.arange(cfg.m_r) / cfg.m_r
    if kind == TopologyKind.UCirA:
        return np.column_stack([r * np.cos(ang), r * np.sin(ang), np.zeros_like(ang)])
    pts = [(r * math.cos(a), r * math.sin(a), iz * cfg.d_z)
           for a in ang for iz in range(cfg.m_z)]
    return np.array(pts)


def _check_angles(phi, theta):
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(phi < -np.pi - 1e-12) or np.any(phi > np.pi + 1e-12):
        raise ValueError("azimuth must lie in [-pi, pi]")
    if np.any(theta < -1e-12) or np.any(theta > np.pi + 1e-12):
        raise ValueError("elevation must lie in [0, pi]")
    return phi, theta


def steering_matrix(cfg: ArrayConfig, phi, theta) -> np.ndarray:
    """Steering vectors for arrays of angles, shape (M, len(phi)).

    Entry for an antenna at (x, y, z) is
    exp(j 2 pi (x sin(th) cos(ph) + y sin(th) sin(ph) + z cos(th))); the ULA
    keeps its sin(theta) factor.  Built per axis and composed by Kronecker
    structure (left factor slowest).
    """
    phi, theta = _check_angles(phi, theta)
    phi = np.atleast_1d(phi)
    theta = np.atleast_1d(theta)
    st, ct = np.sin(theta), np.cos(theta)
    two_pi_j = 2j * np.pi

    def ramp(count, d, trig):
        return np.exp(two_pi_j * d * np.arange(count)[:, None] * trig[None, :])

    kind = cfg.kind
    if kind == TopologyKind.ULA:
        return ramp(cfg.m_y, cfg.d_y, st * np.sin(phi))
    if kind == TopologyKind.HURA:
        ax = ramp(cfg.m_x, cfg.d_x, st * np.cos(phi))
        ay = ramp(cfg.m_y, cfg.d_y, st * np.sin(phi))
        return (ax[:, None, :] * ay[None, :, :]).reshape(cfg.num_antennas, -1)
    if kind == TopologyKind.VURA:
        ay = ramp(cfg.m_y, cfg.d_y, st * np.sin(phi))
        az = ramp(cfg.m_z, cfg.d_z, ct)
        return (ay[:, None, :] * az[None, :, :]).reshape(cfg.num_antennas, -1)
    # circular factor: exp(j (pi d_r / sin(pi/M_r)) sin(th) cos(ph - Psi_m))
    ang = 2.0 * np.pi * np.arange(cfg.m_r) / cfg.m_r
    coef = 2.0 * np.pi * cfg.circle_radius()
    ar = np.exp(1j * coef * st[None, :] * np.cos(phi[None, :] - ang[:, None]))
    if kind == TopologyKind.UCirA:
        return ar
    az = ramp(cfg.m_z, cfg.d_z, ct)
    return (ar[:, None, :] * az[None, :, :]).reshape(cfg.num_antennas, -1)


def steering_vector(cfg: ArrayConfig, phi: float, theta: float) -> np.ndarray:
    """Steering vector a(phi, theta) of length M (unit-modulus entries)."""
    out = steering_matrix(cfg, [phi], [theta])
    if out.ndim == 3:
        out = out.reshape(cfg.num_antennas, 1)
    return out[:, 0]


def two_ray_interference(cfg: ArrayConfig, phi1: float, theta1: float,
                         phi2: float, theta2: float):
    """|a(phi1, theta1)^H a(phi2, theta2)|^2, raw and normalized by M^2.

    The raw value lies in [0, M^2] and equals M^2 for identical angles.
    Returns (raw, normalized).
    """
    a1 = steering_vector(cfg, phi1, theta1)
    a2 = steering_vector(cfg, phi2, theta2)
    raw = float(abs(np.vdot(a1, a2)) ** 2)
    m = cfg.num_antennas
    return raw, raw / (m * m)


def footprint_diameter(cfg: ArrayConfig) -> float:
    """Largest pairwise distance of the azimuth-plane (x, y) footprint."""
    pos = antenna_positions(cfg)[:, :2]
    pos = np.unique(pos, axis=0)
    if len(pos) == 1:
        return 0.0
    diff = pos[:, None, :] - pos[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=2)).max())
