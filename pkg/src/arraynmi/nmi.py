"""Closed-form normalized mean interference (NMI) for the five topologies.

The NMI is kappa = (1/M^2) * sum over antenna pairs of |E[phase term]|^2,
where the expectation runs over the composite azimuth/elevation angle
distributions.  Every pair reduces to one of two expectations:

  planar:   E[exp(j*sqrt(z1^2+z2^2) * sin(th) * sin(ph + A))]
  vertical: E[exp(j*z1*sin(th)*sin(ph + A) + j*z2*cos(th))]

Both are evaluated as Fourier-Bessel double/triple series driven by the
characteristic functions psi(n) (azimuth) and chi(n) (elevation).  The
series weight the elevation CF at even arguments as (-1)^n' chi(2n'); the
pairing of (n', nhat) with (-n', -nhat) is applied exactly, which splits the
vertical kernel into a fast Bessel part coupled to Re chi and a slowly
decaying correction coupled only to Im chi (zero for elevation laws
symmetric about a multiple of pi/2).  Tails beyond the Bessel decay zone
fall off only algebraically (opposite-order products ~ 1/n'^(q+1)), so all
sums extend in geometric blocks with measured tail estimates until the
truncation budget is met, or fail loudly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angular import AngularModel, composite_cf
from .bessel import BesselGrid, nu_cutoff
from .geometry import ArrayConfig, TopologyKind


@dataclass(frozen=True)
class TruncationPolicy:
    """Finite caps and tolerances replacing the infinite series sums.

    cf_floor prunes azimuth harmonics once |psi(n)| falls below it;
    bessel_floor sets the negligibility threshold for Bessel-damped terms;
    series_tol is the absolute tail budget certified per series value.
    Hard caps bound the harmonic indices; exhausting one raises
    SeriesConvergenceError instead of silently truncating.
    """

    cf_floor: float = 1e-12
    bessel_floor: float = 1e-14
    series_tol: float = 1e-10
    max_n: int = 512
    max_nprime: int = 40000
    max_nhat: int = 40000
    max_nhatprime: int = 4000

    def __post_init__(self):
        if min(self.cf_floor, self.bessel_floor, self.series_tol) <= 0:
            raise ValueError("floors and tolerance must be positive")
        if min(self.max_n, self.max_nprime, self.max_nhat, self.max_nhatprime) < 4:
            raise ValueError("hard caps are unreasonably small")


@dataclass(frozen=True)
class SeriesParams:
    """Phase parameters of one antenna pair: rotation A and coefficients z1, z2.

    For circular kinds, a and b are the sine/cosine differences of the two
    ring angles that produced (z1, A)."""

    A: float
    z1: float
    z2: float
    a: float | None = None
    b: float | None = None


@dataclass(frozen=True)
class NmiValue:
    kappa: float
    topology: TopologyKind
    num_antennas: int
    metadata: dict = field(default_factory=dict)


class SeriesConvergenceError(RuntimeError):
    """A hard cap was exhausted before the tail budget was met."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


# --------------------------------------------------------------------------
# characteristic-function tables
# --------------------------------------------------------------------------

def _vectorized(cf):
    try:
        out = np.asarray(cf(np.array([0, 1, -1])))
        if out.shape == (3,):
            return cf
    except Exception:
        pass
    return lambda n: np.array([cf(int(v)) for v in np.atleast_1d(n)])


class _CfPair:
    """Cached evaluations of psi and of chi'(m) = (-1)^m chi(2m)."""

    def __init__(self, psi, chi, trunc: TruncationPolicy):
        self.psi_fn = _vectorized(psi)
        self.chi_fn = _vectorized(chi)
        self.trunc = trunc
        for name, fn in (("psi", self.psi_fn), ("chi", self.chi_fn)):
            v0 = complex(np.asarray(fn(np.array([0])))[0])
            if abs(v0 - 1.0) > 1e-9:
                raise ValueError(f"{name}(0) must equal 1, got {v0}")
            probe = np.asarray(fn(np.arange(-8, 9)))
            if np.max(np.abs(probe)) > 1.0 + 1e-9:
                raise ValueError(f"|{name}| must not exceed 1")
            if np.max(np.abs(probe - np.conj(probe[::-1]))) > 1e-9:
                raise ValueError(f"{name} must satisfy cf(-n) = conj(cf(n))")
        self._psi = np.asarray(self.psi_fn(np.array([0])), dtype=complex)
        self._chi_re = None
        self._chi_im = None
        self._chi_n = -1
        self._grow_chi(64)

    # psi ------------------------------------------------------------------
    def psi(self, n: int) -> complex:
        a = abs(n)
        if a >= len(self._psi):
            hi = max(2 * len(self._psi), a + 16)
            self._psi = np.asarray(self.psi_fn(np.arange(0, hi + 1)), dtype=complex)
        v = self._psi[a]
        return v if n >= 0 else complex(v).conjugate()

    # chi' -----------------------------------------------------------------
    def _grow_chi(self, n: int):
        if n <= self._chi_n:
            return
        n = max(n, 2 * max(self._chi_n, 32))
        m = np.arange(-n, n + 1)
        vals = np.asarray(self.chi_fn(2 * m), dtype=complex)
        vals = np.where(m % 2 == 0, vals, -vals)
        self._chi_re = vals.real
        self._chi_im = vals.imag
        self._chi_n = n
        self.chi_has_im = bool(np.max(np.abs(self._chi_im)) > 1e-13)

    def chi_re(self, idx: np.ndarray) -> np.ndarray:
        hi = int(np.max(np.abs(idx))) if np.size(idx) else 0
        self._grow_chi(hi)
        return self._chi_re[np.asarray(idx) + self._chi_n]

    def chi_im(self, idx: np.ndarray) -> np.ndarray:
        hi = int(np.max(np.abs(idx))) if np.size(idx) else 0
        self._grow_chi(hi)
        return self._chi_im[np.asarray(idx) + self._chi_n]


# --------------------------------------------------------------------------
# series engines
# --------------------------------------------------------------------------

class _GrowingGrid:
    """BesselGrid wrapper that rebuilds with headroom when orders outgrow it."""

    def __init__(self, x: float, kmax: int):
        self.x = x
        self.grid = BesselGrid(x, kmax, kmax)

    def ensure(self, kmax: int):
        if kmax > self.grid.kpos:
            size = max(int(kmax * 1.3) + 8, 2 * self.grid.kpos)
            self.grid = BesselGrid(self.x, size, size)

    def products(self, a, b):
        return self.grid.products(a, b)


class _PlanarSeries:
    """S(q) = sum_{n'} (-1)^{n'} chi(2n') J_{q/2-n'}(u) J_{q/2+n'}(u), cached per q."""

    def __init__(self, u: float, cf: _CfPair, trunc: TruncationPolicy):
        self.u = u
        self.cf = cf
        self.trunc = trunc
        self.base = nu_cutoff(u)
        self.grid = _GrowingGrid(u, 2 * (self.base + 48))
        self._s: dict[int, float] = {}
        self._last_hi = 0   # converged n' extent carries over between q values
        self.abs_bound = 0.0   # running max of sum |terms|, for outer-loop stops

    def value(self, q: int) -> float:
        if q not in self._s:
            self._s[q] = self._compute(q)
        return self._s[q]

    def _compute(self, q: int) -> float:
        trunc = self.trunc
        tol = 0.5 * trunc.series_tol
        lo, hi = 0, max(self.base + q // 2 + 12, self._last_hi)
        total = 0.0
        absum = 0.0
        prev_block = None
        needed = hi
        while True:
            self.grid.ensure(q + 2 * hi + 2)
            npr = np.arange(max(lo, 1), hi + 1)
            jp = self.grid.products(q - 2 * npr, q + 2 * npr)
            terms = 2.0 * self.cf.chi_re(npr) * jp
            if lo == 0:
                j0 = self.grid.products(np.array([q]), np.array([q]))[0]
                total += self.cf.chi_re(np.array([0]))[0] * j0
                absum += abs(total)
            block = float(np.sum(terms))
            block_abs = float(np.sum(np.abs(terms)))
            total += block
            absum += block_abs
            if prev_block is not None and prev_block > 0:
                r = min(max(block_abs / prev_block, 0.05), 0.95)
                tail = block_abs * r / (1.0 - r)
            else:
                tail = block_abs
            if block_abs < tol and tail < tol:
                break
            if hi >= trunc.max_nprime:
                raise SeriesConvergenceError(
                    f"n' cap {trunc.max_nprime} exhausted at u={self.u:.6g}, q={q}",
                    partial=total)
            if block_abs >= tol:
                needed = hi
            prev_block = block_abs
            lo, hi = hi + 1, int(hi * 1.5) + 16
        self._last_hi = needed
        self.abs_bound = max(self.abs_bound, absum)
        return total


class _VerticalKernel:
    """Per-z2 tables shared by every vertical series at that axial lag.

    w_re(nhat) = sum_k (-1)^... Re chi'(2(k-nhat)) J_{2k}(z2) and, when the
    elevation CF has an imaginary part, w_im(nhat) = sum_k Im chi'(2(k-nhat))
    C(k, z2) with C the odd-harmonic correction series."""

    def __init__(self, z2: float, cf: _CfPair, trunc: TruncationPolicy):
        self.z2 = z2
        self.cf = cf
        self.trunc = trunc
        az2 = abs(z2)
        self.khi = nu_cutoff(az2) // 2 + 6
        self.gz = BesselGrid(az2, 4 * self.khi + 8, 0)
        k = np.arange(-self.khi, self.khi + 1)
        self.k = k
        self.j2k = self.gz.values(4 * np.abs(k))
        self.has_im = cf.chi_has_im and az2 > 0.0
        self._w_re = np.zeros(0)
        self._w_im = np.zeros(0)
        self._w_n = -1
        if self.has_im:
            nhp_hi = min(nu_cutoff(az2) // 2 + 8, trunc.max_nhatprime)
            self.nhp = np.arange(1, nhp_hi + 1)
            self.jodd = self.gz.values(2 * (2 * self.nhp - 1))
            if z2 < 0:
                self.jodd = -self.jodd

    def _corrections(self, k: np.ndarray) -> np.ndarray:
        """C(k, z2): odd-harmonic correction, antisymmetric in k."""
        num = 2.0 * k[None, :]
        den = (2.0 * self.nhp[:, None] - 1.0) ** 2 - 4.0 * k[None, :] ** 2
        sgn = np.where((self.nhp[:, None] - k[None, :]) % 2 == 0, 1.0, -1.0)
        return (4.0 / math.pi) * np.sum(sgn * self.jodd[:, None] * num / den, axis=0)

    def _ensure_w(self, n: int):
        if n <= self._w_n:
            return
        n = max(n, 2 * max(self._w_n, 64))
        nhat = np.arange(-n, n + 1)
        self._w_re = self.cf.chi_re(self.k[None, :] - nhat[:, None]) @ self.j2k
        self._w_im = self._compute_w_im(nhat) if self.has_im else np.zeros(len(nhat))
        self._w_n = n

    def w_re(self, nhat: np.ndarray) -> np.ndarray:
        hi = int(np.max(np.abs(nhat))) if np.size(nhat) else 0
        self._ensure_w(hi)
        return self._w_re[np.asarray(nhat) + self._w_n]

    def w_im(self, nhat: np.ndarray) -> np.ndarray:
        hi = int(np.max(np.abs(nhat))) if np.size(nhat) else 0
        self._ensure_w(hi)
        return self._w_im[np.asarray(nhat) + self._w_n]

    def _compute_w_im(self, nhat: np.ndarray) -> np.ndarray:
        """Im-part coupling, with its own (slow) k-extension."""
        trunc = self.trunc
        tol = 0.25 * trunc.series_tol
        out = self.cf.chi_im(self.k[None, :] - nhat[:, None]) @ self._corrections(self.k)
        lo, hi = self.khi + 1, 2 * self.khi + 32
        prev_block = None
        while True:
            k = np.arange(lo, hi + 1)
            ck = self._corrections(k)
            blk = (self.cf.chi_im(k[None, :] - nhat[:, None]) @ ck
                   - self.cf.chi_im(-k[None, :] - nhat[:, None]) @ ck)
            out += blk
            block_abs = float(np.max(np.abs(blk))) if blk.size else 0.0
            if prev_block is not None and prev_block > 0:
                r = min(max(block_abs / prev_block, 0.05), 0.95)
                tail = block_abs * r / (1.0 - r)
            else:
                tail = block_abs
            if block_abs < tol and tail < tol:
                return out
            if hi >= trunc.max_nhat:
                raise SeriesConvergenceError(
                    f"Im-part k cap exhausted at z2={self.z2:.6g}")
            prev_block = block_abs
            lo, hi = hi + 1, int(hi * 1.5) + 16


class _VerticalSeries:
    """T(q) = sum_{nhat} J_{q/2-nhat}(u1) J_{q/2+nhat}(u1) [w_re + j w_im](nhat)."""

    def __init__(self, u1: float, kernel: _VerticalKernel, cf: _CfPair,
                 trunc: TruncationPolicy):
        self.u1 = u1
        self.kernel = kernel
        self.cf = cf
        self.trunc = trunc
        self.base = nu_cutoff(u1)
        self.grid = _GrowingGrid(u1, 2 * (self.base + 48))
        self._t: dict[int, complex] = {}
        self._last_hi = 0
        self.abs_bound = 0.0

    def value(self, q: int) -> complex:
        if q not in self._t:
            self._t[q] = self._compute(q)
        return self._t[q]

    def _compute(self, q: int) -> complex:
        trunc = self.trunc
        tol = 0.5 * trunc.series_tol
        kern = self.kernel
        lo, hi = 0, max(self.base + q // 2 + kern.khi + 12, self._last_hi)
        total = 0.0 + 0.0j
        absum = 0.0
        prev_block = None
        needed = hi
        while True:
            self.grid.ensure(q + 2 * hi + 2)
            terms = np.zeros(0, dtype=complex)
            if lo == 0:
                jp0 = self.grid.products(np.array([q]), np.array([q]))[0]
                w0 = kern.w_re(np.array([0]))[0] + 0.0j
                if kern.has_im:
                    w0 += 1j * kern.w_im(np.array([0]))[0]
                terms = np.array([jp0 * w0])
            nh = np.arange(max(lo, 1), hi + 1)
            jp = self.grid.products(q - 2 * nh, q + 2 * nh)
            w = kern.w_re(nh) + 0.0j
            wneg = kern.w_re(-nh) + 0.0j
            if kern.has_im:
                w = w + 1j * kern.w_im(nh)
                wneg = wneg + 1j * kern.w_im(-nh)
            terms = np.concatenate([terms, jp * (w + wneg)])
            block = complex(np.sum(terms))
            block_abs = float(np.sum(np.abs(terms)))
            total += block
            absum += block_abs
            if prev_block is not None and prev_block > 0:
                r = min(max(block_abs / prev_block, 0.05), 0.95)
                tail = block_abs * r / (1.0 - r)
            else:
                tail = block_abs
            if block_abs < tol and tail < tol:
                break
            if hi >= trunc.max_nhat:
                raise SeriesConvergenceError(
                    f"nhat cap {trunc.max_nhat} exhausted at u1={self.u1:.6g}, "
                    f"z2={kern.z2:.6g}, q={q}", partial=total)
            if block_abs >= tol:
                needed = hi
            prev_block = block_abs
            lo, hi = hi + 1, int(hi * 1.5) + 16
        self._last_hi = needed
        self.abs_bound = max(self.abs_bound, absum)
        return total


def _outer_sum(A: float, cf: _CfPair, table, trunc: TruncationPolicy) -> complex:
    """sum_n (-1)^{p(n)} psi(n) e^{jnA} * table(|n|), p(n) = min(n, 0)."""
    total = cf.psi(0) * table.value(0)
    n = 1
    while True:
        pp, pm = cf.psi(n), cf.psi(-n)
        pmag = max(abs(pp), abs(pm))
        if pmag >= trunc.cf_floor:
            s = table.value(n)
            sgn = -1.0 if n % 2 else 1.0
            total += (pp * np.exp(1j * n * A) + sgn * pm * np.exp(-1j * n * A)) * s
            if pmag * max(table.abs_bound, 1.0) < 0.25 * trunc.series_tol and n > 2:
                break
        else:
            break
        if n >= trunc.max_n:
            if pmag * max(table.abs_bound, 1.0) > trunc.series_tol:
                raise SeriesConvergenceError(f"n cap {trunc.max_n} exhausted",
                                             partial=total)
            break
        n += 1
    return complex(total)


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------

DEFAULT_TRUNCATION = TruncationPolicy()


def planar_expectation(params: SeriesParams, psi, chi,
                       trunc: TruncationPolicy = DEFAULT_TRUNCATION) -> complex:
    """E[exp(j sqrt(z1^2+z2^2) sin(th) sin(ph + A))] as a double series."""
    u = 0.5 * math.hypot(params.z1, params.z2)
    if u == 0.0:
        return 1.0 + 0.0j
    cf = psi if isinstance(psi, _CfPair) else _CfPair(psi, chi, trunc)
    return _outer_sum(params.A, cf, _PlanarSeries(u, cf, trunc), trunc)


def vertical_expectation(params: SeriesParams, psi, chi,
                         trunc: TruncationPolicy = DEFAULT_TRUNCATION) -> complex:
    """E[exp(j z1 sin(th) sin(ph + A) + j z2 cos(th))] as a triple series."""
    z1, z2, A = params.z1, params.z2, params.A
    if z1 == 0.0 and z2 == 0.0:
        return 1.0 + 0.0j
    if z1 < 0:   # fold the sign into the azimuth rotation
        z1, A = -z1, A + math.pi
    cf = psi if isinstance(psi, _CfPair) else _CfPair(psi, chi, trunc)
    kernel = _VerticalKernel(z2, cf, trunc)
    return _outer_sum(A, cf, _VerticalSeries(0.5 * z1, kernel, cf, trunc), trunc)


def axial_phase_kernel(n: int, nprime: int, nhat: int, z2: float,
                       trunc: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    """Axial-lag kernel G: J_{2(n'+nhat)}(z2) plus the odd-harmonic correction.

    Equals (-1)^(n'+nhat) * (1/pi) * integral_0^pi exp(j(z2 cos t
    - 2(n'+nhat) t)) dt; depends on n', nhat only through their sum.
    """
    k = nprime + nhat
    az2 = abs(z2)
    if az2 == 0.0:
        return 1.0 if k == 0 else 0.0
    hi = min(nu_cutoff(az2) // 2 + 8, trunc.max_nhatprime)
    g = BesselGrid(az2, max(4 * abs(k), 2 * (2 * hi - 1)) + 4, 0)
    out = g.value(4 * abs(k))
    if k != 0:
        m = np.arange(1, hi + 1)
        jodd = g.values(2 * (2 * m - 1))
        if z2 < 0:
            jodd = -jodd
        sgn = np.where((m - k) % 2 == 0, 1.0, -1.0)
        out += (4.0 / math.pi) * float(np.sum(sgn * jodd * 2.0 * k
                                              / ((2 * m - 1.0) ** 2 - 4.0 * k * k)))
    return float(out)


def pair_series_params(cfg: ArrayConfig,
                       m_x: int = 0, m_xp: int = 0,
                       m_y: int = 0, m_yp: int = 0,
                       m_z: int = 0, m_zp: int = 0,
                       m_r: int = 0, m_rp: int = 0) -> SeriesParams:
    """Topology dispatch of (A, z1, z2) for one antenna index pair (0-based).

    ULA/HURA/VURA use axis lags times 2*pi*spacing; circular kinds combine
    the ring-angle sine/cosine differences a, b into z1 = pi d_r
    sqrt(a^2+b^2)/sin(pi/M_r) and A = atan2(b, a).  A is quadrant-aware
    (atan2), with A = 0 whenever both arguments vanish.
    """
    kind = cfg.kind
    for name, idx in (("m_x", m_x), ("m_x'", m_xp), ("m_y", m_y), ("m_y'", m_yp),
                      ("m_z", m_z), ("m_z'", m_zp), ("m_r", m_r), ("m_r'", m_rp)):
        axis = "m_" + name[2]
        if not 0 <= idx < getattr(cfg, axis):
            raise IndexError(f"{name}={idx} outside axis range of {axis}")
    if kind == TopologyKind.ULA:
        z1 = 2.0 * math.pi * cfg.d_y * (m_y - m_yp)
        return SeriesParams(A=math.atan2(0.0, z1) if z1 != 0 else 0.0, z1=z1, z2=0.0)
    if kind == TopologyKind.HURA:
        z1 = 2.0 * math.pi * cfg.d_y * (m_y - m_yp)
        z2 = 2.0 * math.pi * cfg.d_x * (m_x - m_xp)
        a_rot = math.atan2(z2, z1) if (z1, z2) != (0.0, 0.0) else 0.0
        return SeriesParams(A=a_rot, z1=z1, z2=z2)
    if kind == TopologyKind.VURA:
        z1 = 2.0 * math.pi * cfg.d_y * (m_y - m_yp)
        z2 = 2.0 * math.pi * cfg.d_z * (m_z - m_zp)
        return SeriesParams(A=math.atan2(0.0, z1) if z1 != 0 else 0.0, z1=z1, z2=z2)
    # circular kinds
    psm = 2.0 * math.pi * m_r / cfg.m_r
    psmp = 2.0 * math.pi * m_rp / cfg.m_r
    a = math.sin(psm) - math.sin(psmp)
    b = math.cos(psm) - math.cos(psmp)
    z1 = math.pi * cfg.d_r * math.hypot(a, b) / math.sin(math.pi / cfg.m_r)
    a_rot = math.atan2(b, a) if (a, b) != (0.0, 0.0) else 0.0
    z2 = 0.0
    if kind == TopologyKind.UCylA:
        z2 = 2.0 * math.pi * cfg.d_z * (m_zp - m_z)
    return SeriesParams(A=a_rot, z1=z1, z2=z2, a=a, b=b)


# --------------------------------------------------------------------------
# kappa assembly
# --------------------------------------------------------------------------

def _planar_groups(cfg: ArrayConfig):
    """(count, A, u, diag) groups over the canonical half of ordered pairs."""
    kind = cfg.kind
    m = cfg.num_antennas
    groups = []
    if kind == TopologyKind.ULA:
        for k in range(1, cfg.m_y):
            z1 = 2.0 * math.pi * cfg.d_y * k
            groups.append((2 * (cfg.m_y - k), 0.0, 0.5 * z1))
    elif kind == TopologyKind.HURA:
        for dx in range(cfg.m_x):
            for dy in range(-(cfg.m_y - 1), cfg.m_y):
                if dx == 0 and dy <= 0:
                    continue
                z1 = 2.0 * math.pi * cfg.d_y * dy
                z2 = 2.0 * math.pi * cfg.d_x * dx
                cnt = 2 * (cfg.m_x - dx) * (cfg.m_y - abs(dy))
                groups.append((cnt, math.atan2(z2, z1), 0.5 * math.hypot(z1, z2)))
    else:  # UCirA
        mr = cfg.m_r
        coef = math.pi * cfg.d_r / math.sin(math.pi / mr)
        for mi in range(mr):
            for mj in range(mi + 1, mr):
                psm = 2.0 * math.pi * mi / mr
                psmp = 2.0 * math.pi * mj / mr
                a = math.sin(psm) - math.sin(psmp)
                b = math.cos(psm) - math.cos(psmp)
                groups.append((2, math.atan2(b, a), 0.5 * coef * math.hypot(a, b)))
    return m, groups


def _vertical_groups(cfg: ArrayConfig):
    """(count, A, z1, z2) canonical groups for VURA / UCylA."""
    kind = cfg.kind
    m = cfg.num_antennas
    groups = []
    if kind == TopologyKind.VURA:
        for dy in range(cfg.m_y):
            for dz in range(-(cfg.m_z - 1), cfg.m_z):
                if dy == 0 and dz <= 0:
                    continue
                cnt = 2 * (cfg.m_y - dy) * (cfg.m_z - abs(dz))
                z1 = 2.0 * math.pi * cfg.d_y * dy
                z2 = 2.0 * math.pi * cfg.d_z * dz
                groups.append((cnt, 0.0, z1, z2))
    else:  # UCylA
        mr, mz = cfg.m_r, cfg.m_z
        coef = math.pi * cfg.d_r / math.sin(math.pi / mr)
        for dz in range(1, mz):   # same ring index, vertical lag only
            groups.append((2 * mr * (mz - dz), 0.0, 0.0, 2.0 * math.pi * cfg.d_z * dz))
        for mi in range(mr):
            for mj in range(mi + 1, mr):
                psm = 2.0 * math.pi * mi / mr
                psmp = 2.0 * math.pi * mj / mr
                a = math.sin(psm) - math.sin(psmp)
                b = math.cos(psm) - math.cos(psmp)
                z1 = coef * math.hypot(a, b)
                arot = math.atan2(b, a)
                for dz in range(-(mz - 1), mz):
                    cnt = 2 * (mz - abs(dz))
                    groups.append((cnt, arot, z1, 2.0 * math.pi * cfg.d_z * dz))
    return m, groups


def nmi_closed_form(cfg: ArrayConfig, model: AngularModel,
                    trunc: TruncationPolicy = DEFAULT_TRUNCATION) -> NmiValue:
    """Closed-form NMI kappa in [0, 1] for any of the five topologies.

    Groups the M^2 antenna pairs by their exact (A, z1, z2) descriptors,
    evaluates one series per conjugate-pair group, and accumulates
    count * |value|^2 / M^2.  Series tables are shared across groups with a
    common Bessel argument.
    """
    psi = lambda n: composite_cf("azimuth", model, n)
    chi = lambda n: composite_cf("elevation", model, n)
    cf = _CfPair(psi, chi, trunc)
    kind = cfg.kind
    n_series = 0
    if kind in (TopologyKind.ULA, TopologyKind.HURA, TopologyKind.UCirA):
        m, groups = _planar_groups(cfg)
        tables: dict[float, _PlanarSeries] = {}
        acc = float(m)   # diagonal pairs contribute 1 each
        for cnt, arot, u in groups:
            key = round(u, 10)
            tab = tables.get(key)
            if tab is None:
                tab = tables[key] = _PlanarSeries(u, cf, trunc)
            val = _outer_sum(arot, cf, tab, trunc)
            n_series += 1
            acc += cnt * (val.real * val.real + val.imag * val.imag)
    else:
        m, groups = _vertical_groups(cfg)
        kernels: dict[float, _VerticalKernel] = {}
        tables: dict[tuple, _VerticalSeries] = {}
        acc = float(m)
        for cnt, arot, z1, z2 in groups:
            kkey = round(abs(z2), 10)
            kern = kernels.get(kkey)
            if kern is None:
                kern = kernels[kkey] = _VerticalKernel(abs(z2), cf, trunc)
            tkey = (round(z1, 10), kkey)
            tab = tables.get(tkey)
            if tab is None:
                tab = tables[tkey] = _VerticalSeries(0.5 * z1, kern, cf, trunc)
            # tables are built for |z2|; a negative lag conjugates the axial
            # factor, which only matters when chi' has an imaginary part
            src = _ConjTable(tab) if (z2 < 0 and kern.has_im) else tab
            val = _outer_sum(arot, cf, src, trunc)
            n_series += 1
            acc += cnt * (val.real * val.real + val.imag * val.imag)
    kappa = acc / (m * m)
    kappa = min(max(kappa, 0.0), 1.0)
    meta = {
        "series_evaluations": n_series,
        "series_tol": trunc.series_tol,
        "spacings": {"d_x": cfg.d_x, "d_y": cfg.d_y, "d_z": cfg.d_z, "d_r": cfg.d_r},
    }
    return NmiValue(kappa=kappa, topology=kind, num_antennas=m, metadata=meta)


class _ConjTable:
    """View of a vertical table for the opposite z2 sign: T -> conj(T)."""

    def __init__(self, tab: _VerticalSeries):
        self._tab = tab

    @property
    def abs_bound(self):
        return self._tab.abs_bound

    def value(self, q: int) -> complex:
        return complex(self._tab.value(q)).conjugate()
