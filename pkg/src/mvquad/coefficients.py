"""Closed-form coefficients of the pan- and metaharmonic mean value identities.

All functions accept a scalar or an array ``t`` in ``[0, 50]``.  The
normalised Bessel quotients are analytic in ``t**2`` and are evaluated from
their power series near 0, so ``t = 0`` needs no special casing.
"""
from dataclasses import dataclass
import csv
import math
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import PreconditionError, UsageError, NumericalError
from .quadrature import ball_volume
from .specfun import (
    I_SERIES_MAX,
    J_SERIES_MAX,
    _as_t,
    _out,
    bessel_i,
    bessel_j,
    check_dimension,
    first_zero_for_dimension,
    normalized_i,
    normalized_j,
)

CURVE_SAMPLES = 512


def a_circ_pan(m, t):
    """Sphere-mean factor ``Gamma(m/2) I_{(m-2)/2}(t) / (t/2)**((m-2)/2)``."""
    return normalized_i((check_dimension(m) - 2) / 2.0, t)


def a_bullet_pan(m, t):
    """Ball-mean factor ``Gamma(m/2+1) I_{m/2}(t) / (t/2)**(m/2)``."""
    return normalized_i(check_dimension(m) / 2.0, t)


def a_circ_meta(m, t):
    """As :func:`a_circ_pan` with ``J`` in place of ``I``; ``J_0(t)`` for m = 2."""
    return normalized_j((check_dimension(m) - 2) / 2.0, t)


def a_bullet_meta(m, t):
    """As :func:`a_bullet_pan` with ``J`` in place of ``I``; ``2 J_1(t)/t`` for m = 2."""
    return normalized_j(check_dimension(m) / 2.0, t)


def a_log(t):
    """Log-weighted disc factor ``2 (I_0(t) - 1) / t**2`` (limit 1/2 at 0).

    Uses ``sum_k (t**2/4)**k / (2 ((k+1)!)**2)``, which has no cancellation.
    """
    t_arr = _as_t(t)
    res = np.empty_like(t_arr)
    small = t_arr <= I_SERIES_MAX
    res[small] = 0.5 * _kernels.series(0.25 * t_arr[small] ** 2, 2.0, 2.0)
    big = t_arr[~small]
    res[~small] = 2.0 * (np.asarray(bessel_i(0, big)) - 1.0) / big**2
    return _out(res, t)


def a_tilde(t):
    """Log-weighted disc factor ``2 (1 - J_0(t)) / t**2`` (limit 1/2 at 0)."""
    t_arr = _as_t(t)
    res = np.empty_like(t_arr)
    small = t_arr <= J_SERIES_MAX
    res[small] = 0.5 * _kernels.series(-0.25 * t_arr[small] ** 2, 2.0, 2.0)
    big = t_arr[~small]
    res[~small] = 2.0 * (1.0 - np.asarray(bessel_j(0, big))) / big**2
    return _out(res, t)


def r_star(m, r1, r2):
    """Radius of the sphere whose mean equals the annulus mean for harmonic functions."""
    m = check_dimension(m)
    r1, r2 = float(r1), float(r2)
    if not 0.0 <= r1 < r2:
        raise UsageError(f"r_star needs 0 <= r1 < r2, got r1={r1}, r2={r2}")
    if m == 2:
        r1_term = r1 * r1 * math.log(r1) if r1 > 0.0 else 0.0
        return math.exp((r2 * r2 * math.log(r2) - r1_term) / (r2 * r2 - r1 * r1) - 0.5)
    base = 2.0 * (r2**m - r1**m) / (m * (r2 * r2 - r1 * r1))
    return base if m == 3 else base ** (1.0 / (m - 2))


PAN, META = "Pan", "Meta"


def annulus_coeff(kind, m, parameter, r1, r2, r):
    """Factor ``c`` with ``M_ball(annulus) = c * M_sphere(S_r)`` for pan/metaharmonic u.

    ``c = (a_bullet(p r2)|B_r2| - a_bullet(p r1)|B_r1|) / (a_circ(p r)|A|)``.
    The metaharmonic form requires ``parameter * r2`` below the first zero of
    ``J_{(m-2)/2}`` so that the denominator cannot vanish.
    """
    m = check_dimension(m)
    if not 0.0 < r1 < r2:
        raise PreconditionError(f"annulus needs 0 < r1 < r2, got r1={r1}, r2={r2}")
    if not r1 <= r <= r2:
        raise PreconditionError(f"sphere radius {r} outside [r1, r2] = [{r1}, {r2}]")
    if not parameter > 0:
        raise PreconditionError("parameter must be positive")
    if kind == PAN:
        a_b, a_c = a_bullet_pan, a_circ_pan
    elif kind == META:
        j = first_zero_for_dimension(m)
        if parameter * r2 >= j:
            raise PreconditionError(
                f"metaharmonic annulus needs r2 < j_{{(m-2)/2,1}}/lambda = {j / parameter!r}, got r2={r2}"
            )
        a_b, a_c = a_bullet_meta, a_circ_meta
    else:
        raise UsageError(f"unknown coefficient kind {kind!r}")
    b1, b2 = ball_volume(m, r1), ball_volume(m, r2)
    denom = a_c(m, parameter * r) * (b2 - b1)
    if denom == 0.0:
        raise NumericalError("annulus coefficient denominator vanished")
    return (a_b(m, parameter * r2) * b2 - a_b(m, parameter * r1) * b1) / denom


@dataclass(frozen=True)
class CoefficientCurve:
    name: str
    samples: tuple

    def __post_init__(self):
        ts = [t for t, _ in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise UsageError("curve abscissae must be strictly increasing")
        if not all(math.isfinite(v) for _, v in self.samples):
            raise NumericalError(f"curve {self.name} has non-finite values")

    def write_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "value"])
            for t, v in self.samples:
                writer.writerow([f"{t:.17g}", f"{v:.17g}"])
        return path


COEFFICIENTS = {
    "a_circ_pan": lambda m, t: a_circ_pan(m, t),
    "a_bullet_pan": lambda m, t: a_bullet_pan(m, t),
    "a_circ_meta": lambda m, t: a_circ_meta(m, t),
    "a_bullet_meta": lambda m, t: a_bullet_meta(m, t),
    "a_log": lambda m, t: a_log(t),
    "a_tilde": lambda m, t: a_tilde(t),
}


def sample_curve(name, m, t_max, t_min=0.0, n=CURVE_SAMPLES):
    if name not in COEFFICIENTS:
        raise UsageError(f"unknown coefficient {name!r}; choose from {sorted(COEFFICIENTS)}")
    if not t_min < t_max:
        raise UsageError("t_max must exceed t_min")
    ts = np.linspace(t_min, t_max, n)
    vals = np.asarray(COEFFICIENTS[name](m, ts), dtype=np.float64)
    return CoefficientCurve(name, tuple(zip(ts.tolist(), vals.tolist())))
