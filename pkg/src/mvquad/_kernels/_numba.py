"""numba-compiled versions of the kernels in ``_numpy``; same signatures."""
import math

import numpy as np
from numba import njit

from ._numpy import ASYMPTOTIC_MAX_TERMS, SERIES_MAX_TERMS, SERIES_RTOL


@njit(cache=True)
def _series_flat(z, c, d):
    out = np.empty_like(z)
    for i in range(z.size):
        zi = z[i]
        total = 1.0
        term = 1.0
        for k in range(SERIES_MAX_TERMS):
            term = term * zi / ((k + c) * (k + d))
            total = total + term
            if abs(term) < SERIES_RTOL * abs(total):
                break
        out[i] = total
    return out


@njit(cache=True)
def _asymptotic_i_flat(nu, t):
    out = np.empty_like(t)
    mu = 4.0 * nu * nu
    for i in range(t.size):
        total = 1.0
        term = 1.0
        for k in range(1, ASYMPTOTIC_MAX_TERMS):
            new = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * t[i])
            if abs(new) >= abs(term):
                break
            total = total + new
            term = new
            if abs(new) < SERIES_RTOL * abs(total):
                break
        out[i] = total
    return out


@njit(cache=True)
def _bessel_integral_j_flat(n, t, nodes):
    out = np.empty_like(t)
    sines = np.empty(nodes)
    thetas = np.empty(nodes)
    for j in range(nodes):
        thetas[j] = 2.0 * math.pi * j / nodes
        sines[j] = math.sin(thetas[j])
    for i in range(t.size):
        acc = 0.0
        for j in range(nodes):
            acc += math.cos(n * thetas[j] - t[i] * sines[j])
        out[i] = acc / nodes
    return out


@njit(cache=True)
def _multilinear(grid, lo, step, shape, points):
    npts, m = points.shape
    out = np.zeros(npts)
    strides = np.empty(m, dtype=np.int64)
    s = 1
    for a in range(m - 1, -1, -1):
        strides[a] = s
        s *= shape[a]
    idx = np.empty(m, dtype=np.int64)
    frac = np.empty(m)
    for p in range(npts):
        for a in range(m):
            u = (points[p, a] - lo[a]) / step[a]
            i = int(math.floor(u))
            if i < 0:
                i = 0
            elif i > shape[a] - 2:
                i = shape[a] - 2
            idx[a] = i
            frac[a] = u - i
        acc = 0.0
        for corner in range(1 << m):
            w = 1.0
            flat = 0
            for a in range(m):
                bit = (corner >> (m - 1 - a)) & 1
                if bit:
                    w *= frac[a]
                else:
                    w *= 1.0 - frac[a]
                flat += (idx[a] + bit) * strides[a]
            acc += w * grid[flat]
        out[p] = acc
    return out


def series(z, c, d):
    z = np.asarray(z, dtype=np.float64)
    return _series_flat(np.ascontiguousarray(z).ravel(), float(c), float(d)).reshape(z.shape)


def asymptotic_i(nu, t):
    t = np.asarray(t, dtype=np.float64)
    return _asymptotic_i_flat(float(nu), np.ascontiguousarray(t).ravel()).reshape(t.shape)


def bessel_integral_j(n, t, nodes):
    t = np.asarray(t, dtype=np.float64)
    flat = np.ascontiguousarray(t).ravel()
    return _bessel_integral_j_flat(int(n), flat, int(nodes)).reshape(t.shape)


def multilinear(values, lo, step, shape, points):
    return _multilinear(
        np.ascontiguousarray(values, dtype=np.float64).ravel(),
        np.asarray(lo, dtype=np.float64),
        np.asarray(step, dtype=np.float64),
        np.asarray(shape, dtype=np.int64),
        np.ascontiguousarray(points, dtype=np.float64),
    )
