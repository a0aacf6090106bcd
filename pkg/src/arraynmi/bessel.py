"""Bessel functions of the first kind for integer and half-integer orders.

The closed-form interference series need J_nu(x) on a dense lattice of
orders nu = k/2 at a fixed argument, including large negative half-integer
orders whose values overflow double precision even though the order-pair
products that enter the series stay O(1).  ``BesselGrid`` therefore stores
every value as ``mantissa * 2**exponent`` and exposes an overflow-safe
product.  Evaluation is by downward (Miller) recurrence with periodic
rescaling; half-integer runs are anchored to the elementary closed forms
J_{1/2} = sqrt(2/(pi x)) sin x and J_{-1/2} = sqrt(2/(pi x)) cos x, and the
integer run is normalized with J_0 + 2*sum J_{2k} = 1.  Small arguments use
the ascending power series directly.
"""

from __future__ import annotations

import math

import numpy as np

_RESCALE = 500          # rescale recurrence values beyond 2**_RESCALE
_SERIES_X_MAX = 9.0     # ascending series is safe (no deep cancellation) below this


def nu_cutoff(x: float) -> int:
    """Smallest order beyond which |J_nu(x)| is negligible (< ~1e-18 * max)."""
    if x <= 0.0:
        return 8
    return int(x + 12.5 * x ** (1.0 / 3.0) + 18.0)


def _ascending_series(nu: float, x: float) -> float:
    """J_nu(x) by the power series; accurate for small x or nu >= x**2/4."""
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    lead = nu * math.log(x / 2.0) - math.lgamma(nu + 1.0)
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    for k in range(1, 400):
        term *= q / (k * (nu + k))
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return math.exp(lead) * total if total != 0.0 else 0.0


class BesselGrid:
    """J_{k/2}(x) for k in [-kneg, kpos], k in half-order units (k = 2*nu).

    Values are held as ``mant * 2**exp2`` so that deep-decay positive orders
    and exploding negative orders both stay representable; ``products`` forms
    J_a * J_b without intermediate over/underflow.
    """

    def __init__(self, x: float, kpos: int, kneg: int = 0):
        if x < 0:
            raise ValueError("argument must be nonnegative")
        self.x = float(x)
        self.kpos = int(kpos)
        self.kneg = int(kneg)
        n = self.kpos + self.kneg + 1
        self.mant = np.zeros(n)
        self.exp2 = np.zeros(n, dtype=np.int64)
        if self.x < 1e-120:
            # delta limit: J_0 -> 1, everything else vanishes (and the
            # recurrence ratio 2*nu/x would overflow the rescale headroom)
            self.x = 0.0
            self._set(0, 1.0, 0)
            return
        self._build_integer()
        if self.kpos >= 1:
            self._build_half()

    # -- storage -----------------------------------------------------------
    def _set(self, order2: int, m: float, e: int):
        i = order2 + self.kneg
        self.mant[i] = m
        self.exp2[i] = e

    # -- construction ------------------------------------------------------
    def _miller_down(self, orders: np.ndarray):
        """Unnormalized downward recurrence from a tiny seed.

        Returns (mant, boost) with sequence value = mant * 2**boost up to one
        common normalization constant.  ``orders`` descends in steps of 1."""
        x = self.x
        m = np.zeros(len(orders))
        boost = np.zeros(len(orders), dtype=np.int64)
        fp = 0.0
        fc = 1e-300
        b = 0
        two_pow = 2.0 ** _RESCALE
        for i in range(len(orders)):
            m[i] = fc
            boost[i] = b
            fn = (2.0 * orders[i] / x) * fc - fp
            fp, fc = fc, fn
            if abs(fc) > two_pow:
                fc = math.ldexp(fc, -_RESCALE)
                fp = math.ldexp(fp, -_RESCALE)
                b += _RESCALE
        return m, boost

    def _store_bulk(self, order2: np.ndarray, mant: np.ndarray, exp2: np.ndarray):
        keep = (order2 <= self.kpos) & (order2 >= -self.kneg)
        mm, me = np.frexp(mant[keep])
        bad = (mant[keep] == 0.0) | ~np.isfinite(mant[keep])
        mm[bad] = 0.0
        idx = order2[keep] + self.kneg
        self.mant[idx] = mm
        self.exp2[idx] = np.where(bad, 0, exp2[keep] + me)

    def _build_integer(self):
        x = self.x
        top = max(self.kpos // 2, (self.kneg + 1) // 2, nu_cutoff(x)) + 16
        orders = np.arange(top, -1, -1, dtype=float)
        m, boost = self._miller_down(orders)
        even = (orders.astype(np.int64) % 2) == 0
        bmax = int(boost[even].max())
        t = 2.0 * float(np.sum(np.ldexp(m[even], (boost[even] - bmax).astype(np.int32))))
        t -= math.ldexp(m[-1], int(boost[-1]) - bmax)   # J_0 counted once
        k = orders.astype(np.int64)
        self._store_bulk(2 * k, m / t, boost - bmax)
        kneg = np.arange(1, self.kneg // 2 + 1)
        if len(kneg):
            idx = 2 * kneg + self.kneg
            sgn = np.where(kneg % 2 == 0, 1.0, -1.0)
            self.mant[-2 * kneg + self.kneg] = sgn * self.mant[idx]
            self.exp2[-2 * kneg + self.kneg] = self.exp2[idx]

    def _build_half(self):
        x = self.x
        top = max((self.kpos + 1) // 2, nu_cutoff(x)) + 16
        orders = np.arange(top + 0.5, 0.4, -1.0)        # ..., 1.5, 0.5
        m, boost = self._miller_down(orders)
        b12 = int(boost[-1])
        f12 = m[-1]
        f32 = math.ldexp(m[-2], int(boost[-2]) - b12)
        fm12 = (1.0 / x) * f12 - f32                    # order -1/2, scale b12
        c = math.sqrt(2.0 / (math.pi * x))
        jt12 = c * math.sin(x)
        jtm12 = c * math.cos(x)
        scale = jt12 / f12 if abs(jt12) >= abs(jtm12) else jtm12 / fm12
        sm, se = math.frexp(scale)
        k2 = np.rint(2 * orders).astype(np.int64)
        self._store_bulk(k2, m * sm, boost - b12 + se)
        if self.kneg < 1:
            return
        # negative half orders grow with |nu|: downward from the exact anchors
        steps = (self.kneg - 1) // 2 + 1
        vals = np.empty(steps)
        boosts = np.empty(steps, dtype=np.int64)
        vals[0] = jtm12
        boosts[0] = 0
        fp, fc = jt12, jtm12
        b = 0
        nu = -0.5
        lim = 2.0 ** _RESCALE
        for i in range(1, steps):
            fn = (2.0 * nu / x) * fc - fp
            fp, fc = fc, fn
            nu -= 1.0
            if abs(fc) > lim:
                fc = math.ldexp(fc, -_RESCALE)
                fp = math.ldexp(fp, -_RESCALE)
                b += _RESCALE
            vals[i] = fc
            boosts[i] = b
        self._store_bulk(-1 - 2 * np.arange(steps), vals, boosts)

    # -- access --------------------------------------------------------------
    def value(self, order2: int) -> float:
        """J_{order2/2}(x); may overflow to inf for deep negative orders."""
        i = order2 + self.kneg
        e = int(self.exp2[i])
        if e > 1024:
            return math.inf if self.mant[i] > 0 else -math.inf
        return math.ldexp(self.mant[i], e)

    def values(self, order2: np.ndarray) -> np.ndarray:
        i = np.asarray(order2) + self.kneg
        return np.ldexp(self.mant[i], np.clip(self.exp2[i], -1400, 1400).astype(np.int32))

    def products(self, order2_a, order2_b) -> np.ndarray:
        """J_{a/2}(x) * J_{b/2}(x), elementwise, without over/underflow."""
        ia = np.asarray(order2_a) + self.kneg
        ib = np.asarray(order2_b) + self.kneg
        e = self.exp2[ia] + self.exp2[ib]
        return np.ldexp(self.mant[ia] * self.mant[ib],
                        np.clip(e, -1400, 1400).astype(np.int32))


def bessel_j(nu: float, x: float) -> float:
    """J_nu(x) for real x >= 0 and 2*nu integer.

    Negative integer orders use J_{-m} = (-1)^m J_m; negative half-integer
    orders follow the (growing) downward recurrence from the trigonometric
    anchors.  Raises for x < 0, non-half-integer order, or the divergent
    combination x = 0 with a negative half-integer order.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    order2 = 2.0 * nu
    if abs(order2 - round(order2)) > 1e-12:
        raise ValueError("order must be an integer or half-integer")
    order2 = int(round(order2))
    if x == 0.0:
        if order2 % 2 != 0 and order2 < 0:
            raise ValueError("J_nu(0) diverges for negative half-integer orders")
        return 1.0 if order2 == 0 else 0.0
    anu = abs(order2) / 2.0
    if order2 % 2 == 0 and (x <= _SERIES_X_MAX or x * x <= 4.0 * (anu + 1.0)):
        val = _ascending_series(anu, x)
        return val if order2 >= 0 or (order2 // 2) % 2 == 0 else -val
    if order2 == 1:
        return math.sqrt(2.0 / (math.pi * x)) * math.sin(x)
    if order2 == -1:
        return math.sqrt(2.0 / (math.pi * x)) * math.cos(x)
    size = max(abs(order2), 2)
    grid = BesselGrid(x, size, size if order2 < 0 else 0)
    return grid.value(order2)
