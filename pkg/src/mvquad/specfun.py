"""Gamma, modified Bessel ``I_nu``, Bessel ``J_nu`` and first Bessel zeros.

Only orders with ``2*nu`` integral and ``0 <= nu <= 5/2`` are supported; that
covers ``(m-2)/2`` and ``m/2`` for dimensions 2..5.  Arguments are real and lie
in ``[0, T_MAX]``.

Evaluation strategy:

* ``I_nu``: power series for ``t <= I_SERIES_MAX``; above it the sinh/cosh
  closed forms for half-integer orders and the large-argument asymptotic
  expansion for integer orders.
* ``J_nu``: power series for ``t <= J_SERIES_MAX``; above it the sin/cos
  closed forms for half-integer orders and Bessel's integral (periodic
  trapezoid rule) for integer orders.  The alternating series loses about
  ``log10 I_0(t)`` digits, hence the lower crossover.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from . import _kernels
from .errors import DomainError, NumericalError, RangeError, UnsupportedDimensionError, UnsupportedOrderError

T_MAX = 50.0
I_SERIES_MAX = 15.0
J_SERIES_MAX = 8.0
BESSEL_INTEGRAL_NODES = 128
MAX_TWICE_NU = 5
MIN_DIM, MAX_DIM = 2, 5


@dataclass(frozen=True)
class Order:
    """Bessel order stored as ``2*nu`` so half-integers are exact."""

    twice_nu: int

    def __post_init__(self):
        if not isinstance(self.twice_nu, (int, np.integer)) or self.twice_nu < 0:
            raise UnsupportedOrderError(f"twice_nu must be a nonnegative integer, got {self.twice_nu!r}")
        if self.twice_nu > MAX_TWICE_NU:
            raise UnsupportedOrderError(f"order {self.twice_nu}/2 exceeds the supported maximum 5/2")

    @classmethod
    def of(cls, nu):
        if isinstance(nu, Order):
            return nu
        twice = 2.0 * float(nu)
        if twice != round(twice):
            raise UnsupportedOrderError(f"order {nu} is not a multiple of 1/2")
        return cls(int(round(twice)))

    @property
    def nu(self):
        return self.twice_nu / 2.0

    @property
    def half_integer(self):
        return self.twice_nu % 2 == 1


def gamma(x):
    """Gamma function for positive real ``x``.

    Integer and half-integer arguments use the exact recurrences from
    ``Gamma(1) = 1`` and ``Gamma(1/2) = sqrt(pi)``.
    """
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"gamma requires a finite positive argument, got {x}")
    twice = 2.0 * x
    if twice == round(twice) and x <= 170.0:
        if round(twice) % 2 == 0:
            return float(math.factorial(int(round(x)) - 1))
        value = math.sqrt(math.pi)
        k = 0.5
        while k < x:
            value *= k
            k += 1.0
        return value
    return math.gamma(x)


def unit_sphere_area(m):
    """Total surface area ``2 pi^(m/2) / Gamma(m/2)`` of the unit sphere in R^m."""
    check_dimension(m)
    return 2.0 * math.pi ** (m / 2.0) / gamma(m / 2.0)


def check_dimension(m):
    if int(m) != m or not MIN_DIM <= m <= MAX_DIM:
        raise UnsupportedDimensionError(f"dimension must be an integer in [{MIN_DIM}, {MAX_DIM}], got {m}")
    return int(m)


def _as_t(t):
    arr = np.asarray(t, dtype=np.float64)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > T_MAX):
        raise RangeError(f"argument must lie in [0, {T_MAX}]")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def normalized_i(nu, t):
    """``Gamma(nu+1) I_nu(t) / (t/2)**nu``; analytic in ``t**2`` and 1 at ``t = 0``."""
    order = Order.of(nu)
    t_arr = _as_t(t)
    res = np.empty_like(t_arr)
    small = t_arr <= I_SERIES_MAX
    res[small] = _kernels.series(0.25 * t_arr[small] ** 2, 1.0, order.nu + 1.0)
    if np.any(~small):
        tb = t_arr[~small]
        res[~small] = gamma(order.nu + 1.0) * _large_i(order, tb) / (0.5 * tb) ** order.nu
    return _out(res, t)


def normalized_j(nu, t):
    """``Gamma(nu+1) J_nu(t) / (t/2)**nu``; 1 at ``t = 0``."""
    order = Order.of(nu)
    t_arr = _as_t(t)
    res = np.empty_like(t_arr)
    small = t_arr <= J_SERIES_MAX
    res[small] = _kernels.series(-0.25 * t_arr[small] ** 2, 1.0, order.nu + 1.0)
    if np.any(~small):
        tb = t_arr[~small]
        res[~small] = gamma(order.nu + 1.0) * _large_j(order, tb) / (0.5 * tb) ** order.nu
    return _out(res, t)


def _large_i(order, t):
    if order.half_integer:
        s, c = np.sinh(t), np.cosh(t)
        pref = np.sqrt(2.0 / (math.pi * t))
        if order.twice_nu == 1:
            return pref * s
        if order.twice_nu == 3:
            return pref * (c - s / t)
        return pref * ((1.0 + 3.0 / t**2) * s - 3.0 * c / t)
    return np.exp(t) / np.sqrt(2.0 * math.pi * t) * _kernels.asymptotic_i(order.nu, t)


def _large_j(order, t):
    if order.half_integer:
        s, c = np.sin(t), np.cos(t)
        pref = np.sqrt(2.0 / (math.pi * t))
        if order.twice_nu == 1:
            return pref * s
        if order.twice_nu == 3:
            return pref * (s / t - c)
        return pref * ((3.0 / t**2 - 1.0) * s - 3.0 * c / t)
    return _kernels.bessel_integral_j(order.twice_nu // 2, t, BESSEL_INTEGRAL_NODES)


def bessel_i(nu, t):
    """Modified Bessel function ``I_nu(t)`` for ``0 <= t <= 50``."""
    order = Order.of(nu)
    t_arr = _as_t(t)
    scale = (0.5 * t_arr) ** order.nu / gamma(order.nu + 1.0)
    return _out(scale * np.asarray(normalized_i(order, t_arr)), t)


def bessel_j(nu, t):
    """Bessel function of the first kind ``J_nu(t)`` for ``0 <= t <= 50``."""
    order = Order.of(nu)
    t_arr = _as_t(t)
    res = np.empty_like(t_arr)
    small = t_arr <= J_SERIES_MAX
    scale = (0.5 * t_arr[small]) ** order.nu / gamma(order.nu + 1.0)
    res[small] = scale * _kernels.series(-0.25 * t_arr[small] ** 2, 1.0, order.nu + 1.0)
    if np.any(~small):
        res[~small] = _large_j(order, t_arr[~small])
    return _out(res, t)


def bessel_j_derivative(nu, t):
    """``J_nu'(t) = (nu/t) J_nu(t) - J_{nu+1}(t)``; avoids negative orders."""
    order = Order.of(nu)
    if order.twice_nu + 2 > MAX_TWICE_NU:
        raise UnsupportedOrderError(f"derivative needs order {order.nu + 1}, beyond 5/2")
    t = float(t)
    if t == 0.0:
        return 0.5 if order.twice_nu == 2 else 0.0
    return order.nu / t * bessel_j(order, t) - bessel_j(Order(order.twice_nu + 2), t)


ZERO_ORDERS = (0, 1, 2, 3)
_ZERO_SCAN_STEP = 0.05
_BISECT_WIDTH = 1e-6


@lru_cache(maxsize=None)
def bessel_j_first_zero(nu):
    """First positive zero ``j_{nu,1}`` for ``nu`` in {0, 1/2, 1, 3/2}.

    A coarse scan brackets the sign change in (0, 10]; bisection narrows it
    to width 1e-6 and Newton steps polish it.
    """
    order = Order.of(nu)
    if order.twice_nu not in ZERO_ORDERS:
        raise UnsupportedOrderError(f"first zero only supported for nu in {{0, 1/2, 1, 3/2}}, got {order.nu}")
    lo = _ZERO_SCAN_STEP
    f_lo = bessel_j(order, lo)
    hi = None
    t = lo
    while t < 10.0:
        t_next = min(t + _ZERO_SCAN_STEP, 10.0)
        f_next = bessel_j(order, t_next)
        if f_next == 0.0:
            return t_next
        if (f_next > 0.0) != (f_lo > 0.0):
            lo, hi = t, t_next
            break
        t, f_lo = t_next, f_next
    if hi is None:
        raise NumericalError(f"could not bracket the first zero of J_{order.nu} in (0, 10]")
    while hi - lo > _BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j(order, mid)
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(8):
        step = bessel_j(order, x) / bessel_j_derivative(order, x)
        x_new = x - step
        if not lo - _BISECT_WIDTH <= x_new <= hi + _BISECT_WIDTH:
            raise NumericalError("Newton step left the bisection bracket")
        x = x_new
        if abs(step) < 1e-15 * x:
            break
    return x


def first_zero_for_dimension(m):
    """``j_{(m-2)/2, 1}``, the bound on ``lambda * r`` used by metaharmonic identities."""
    m = check_dimension(m)
    return bessel_j_first_zero(Order(m - 2))
