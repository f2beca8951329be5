"""Pure-numpy kernels; reference path and fallback when numba is disabled."""
import itertools

import numpy as np

SERIES_RTOL = 1e-17
SERIES_MAX_TERMS = 600
ASYMPTOTIC_MAX_TERMS = 80


def series(z, c, d):
    """Sum ``sum_k z**k / prod_{j<k} (j+c)(j+d)`` elementwise.

    Each element stops accumulating once its newest term drops below
    ``SERIES_RTOL`` relative to its partial sum.
    """
    z = np.asarray(z, dtype=np.float64)
    total = np.ones_like(z)
    term = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    for k in range(SERIES_MAX_TERMS):
        term = term * z / ((k + c) * (k + d))
        total = np.where(active, total + term, total)
        active &= np.abs(term) >= SERIES_RTOL * np.abs(total)
        if not active.any():
            break
    return total


def asymptotic_i(nu, t):
    """Scaled large-argument sum ``S`` with ``I_nu(t) ~ exp(t) / sqrt(2 pi t) * S``."""
    t = np.asarray(t, dtype=np.float64)
    mu = 4.0 * nu * nu
    total = np.ones_like(t)
    term = np.ones_like(t)
    active = np.ones(t.shape, dtype=bool)
    for k in range(1, ASYMPTOTIC_MAX_TERMS):
        new = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * t)
        active &= np.abs(new) < np.abs(term)
        total = np.where(active, total + new, total)
        term = new
        active &= np.abs(new) >= SERIES_RTOL * np.abs(total)
        if not active.any():
            break
    return total


def bessel_integral_j(n, t, nodes):
    """``J_n(t)`` for integer n by the periodic trapezoid rule on Bessel's integral."""
    t = np.asarray(t, dtype=np.float64)
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    phase = n * theta - t[..., None] * np.sin(theta)
    return np.cos(phase).sum(axis=-1) / nodes


def multilinear(values, lo, step, shape, points):
    """Multilinear interpolation on a uniform lattice stored in C order."""
    points = np.asarray(points, dtype=np.float64)
    m = len(shape)
    shape = np.asarray(shape)
    grid = np.asarray(values, dtype=np.float64).reshape(tuple(shape))
    u = (points - lo) / step
    idx = np.clip(np.floor(u).astype(np.int64), 0, shape - 2)
    frac = u - idx
    out = np.zeros(points.shape[0])
    for corner in itertools.product((0, 1), repeat=m):
        w = np.ones(points.shape[0])
        for axis, bit in enumerate(corner):
            w = w * (frac[:, axis] if bit else 1.0 - frac[:, axis])
        out += w * grid[tuple(idx[:, a] + corner[a] for a in range(m))]
    return out
