"""Residual probes for open mean-value statements.

``C3_1`` compares the log-weighted annular mean of a harmonic field with its
sphere mean, ``C5_1`` is the panharmonic analogue in the plane, and
``Q2_subharmonic`` scans the annular subharmonic inequality for arbitrary
fields.  Probes only report residual geometry (curves, sign changes,
perturbation slopes); they never decide a statement.
"""
from dataclasses import dataclass, field
import math
import re
from pathlib import Path

import numpy as np

from . import _output
from .coefficients import a_log
from .errors import UsageError
from .quadrature import (
    GeometrySpec, Kind, annulus_mean, default_quadrature, log_weighted_mean, sphere_mean, unit_sphere_rule,
)
from .solutions import FieldKind, SolutionFamily, finite_difference_laplacian, lookup, perturb
from .specfun import unit_sphere_area

C3_1, C5_1, Q2 = "C3_1", "C5_1", "Q2_subharmonic"
DEFAULT_GRID_POINTS = 50
DEFAULT_EPS = (1e-4, 1e-3, 1e-2)
Q2_TOLERANCE = 1e-10
# residuals below this (relative) level are rounding noise for root finding
ROOT_NOISE = 1e-12


@dataclass
class ProbeReport:
    conjecture_id: str
    family_id: str
    geometry: GeometrySpec
    residual_curve: list
    roots: list
    perturbation_response: list = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.residual_curve:
            raise UsageError("a probe needs a nonempty residual curve")

    @property
    def radii(self):
        return np.array([r for r, _ in self.residual_curve])

    @property
    def residuals(self):
        return np.array([v for _, v in self.residual_curve])

    def slopes(self):
        """Ratios of consecutive perturbation responses."""
        resp = self.perturbation_response or []
        return [b[1] / a[1] if a[1] else math.inf for a, b in zip(resp, resp[1:])]

    def summary(self):
        return {
            "conjecture": self.conjecture_id,
            "family_id": self.family_id,
            "geometry": self.geometry.to_dict(),
            "grid_points": len(self.residual_curve),
            "r_range": [self.residual_curve[0][0], self.residual_curve[-1][0]],
            "max_abs_residual": float(np.max(np.abs(self.residuals))),
            "roots": list(self.roots),
            "perturbation_response": [{"eps": e, "max_residual": v} for e, v in self.perturbation_response or []],
            "perturbation_slopes": self.slopes(),
            **self.info,
        }


def chebyshev_grid(lo, hi, n=DEFAULT_GRID_POINTS):
    """``n`` Chebyshev-Lobatto points on ``(lo, hi]``, clustered at both ends."""
    if not 0 < lo < hi:
        raise UsageError("grid needs 0 < lo < hi")
    k = np.arange(1, n + 1)
    return 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.pi * k / n)


def default_grid(annulus):
    return chebyshev_grid(0.05 * annulus.r2, annulus.r2)


def sign_change_roots(radii, values, atol=0.0):
    """Sign changes of a sampled curve, located by linear interpolation.

    Samples with ``|v| <= atol`` are treated as noise and skipped, so a curve
    that is zero to rounding reports no roots.
    """
    sig = [(float(r), float(v)) for r, v in zip(radii, values) if abs(v) > atol or (atol == 0.0 and v == 0.0)]
    roots = []
    for i, (r0, v0) in enumerate(sig):
        if v0 == 0.0:
            roots.append(r0)
        elif i + 1 < len(sig) and v0 * sig[i + 1][1] < 0.0:
            r1, v1 = sig[i + 1]
            roots.append(r0 - v0 * (r1 - r0) / (v1 - v0))
    return roots


def c3_1_constant_residual(m, r1, r2, r):
    """Closed-form C3_1 residual for ``u = 1``.

    Uses ``int_{B_R} log(rho/|y|) dy = |B_R| (1/m + log(rho/R))`` for both balls.
    """
    b1 = unit_sphere_area(m) * r1**m / m
    b2 = unit_sphere_area(m) * r2**m / m
    r = np.asarray(r, dtype=np.float64)
    lhs = m / (b2 - b1) * (b2 * (1.0 / m + np.log(r / r2)) - b1 * (1.0 / m + np.log(r / r1)))
    return lhs - 1.0


def _check_annulus(f, annulus):
    if annulus.kind is not Kind.ANNULUS:
        raise UsageError("probe needs an Annulus geometry with r1 > 0")
    if getattr(f, "dimension", annulus.dimension) != annulus.dimension:
        raise UsageError("geometry and field dimensions differ")
    if isinstance(f, SolutionFamily) and not f.admits(annulus):
        raise UsageError(f"B_r2(x) is not admissible for {f.id}")


def _weighted_curve(conj, f, annulus, radii, q, mu=None):
    m = annulus.dimension
    mean = annulus_mean(f, annulus, q).value
    log_part = log_weighted_mean(f, annulus, 1.0, q).value
    out = []
    for r in radii:
        weighted = log_part + math.log(r) * mean
        rhs = sphere_mean(f, GeometrySpec.sphere(annulus.center, r), q).value
        if conj == C3_1:
            out.append(m * weighted - rhs)
        else:
            out.append(2.0 * weighted - a_log(mu * r) * rhs)
    return np.array(out)


def probe_weighted_annulus(conj, f, annulus, r_grid=None, q=None, eps=DEFAULT_EPS):
    """Residual curve ``lhs - rhs`` of the weighted annulus statement over ``r_grid``.

    C3_1: ``m/|A| int_A u log(r/|x-y|) dy - M_sphere(S_r(x))`` for harmonic ``f``.
    C5_1: ``2/|A| int_A u log(r/|x-y|) dy - a(mu r) M_sphere(S_r(x))`` for
    mu-panharmonic ``f`` in the plane.  The perturbation response records
    ``max_r |R(f + eps |y|^2) - R(f)|`` for each ``eps``.
    """
    if conj == C3_1:
        if f.kind is not FieldKind.HARMONIC:
            raise UsageError(f"C3_1 probes harmonic fields; {f.id} is {f.kind.value}")
        mu = None
    elif conj == C5_1:
        if f.kind is not FieldKind.PANHARMONIC or f.dimension != 2:
            raise UsageError(f"C5_1 probes panharmonic fields in m = 2; {f.id} is {f.kind.value}, m={f.dimension}")
        mu = f.parameter
    else:
        raise UsageError(f"unknown weighted probe {conj!r}")
    _check_annulus(f, annulus)
    q = q or default_quadrature(f.dimension)
    radii = np.asarray(default_grid(annulus) if r_grid is None else r_grid, dtype=np.float64)
    if radii.size == 0 or np.any(radii <= 0) or np.any(radii > annulus.r2):
        raise UsageError("r grid must be nonempty and lie in (0, r2]")
    base = _weighted_curve(conj, f, annulus, radii, q, mu)
    response = None
    if eps:
        bump = lookup(f"sub:normsq:m{f.dimension}")
        response = []
        for e in eps:
            pert = _weighted_curve(conj, perturb(f, bump, e), annulus, radii, q, mu)
            response.append((float(e), float(np.max(np.abs(pert - base)))))
    x = np.asarray(annulus.center)[None, :]
    info = {"u_center": float(np.asarray(f(x))[0])}
    if mu is not None:
        info["mu"] = mu
    noise = ROOT_NOISE * max(1.0, abs(info["u_center"]))
    return ProbeReport(conj, f.id, annulus, [(float(r), float(v)) for r, v in zip(radii, base)],
                       sign_change_roots(radii, base, noise), response, info)


def _laplacian_samples(f, annulus, h):
    m = annulus.dimension
    dirs, _ = unit_sphere_rule(m, 4, 8)
    c = np.asarray(annulus.center)
    shells = np.linspace(0.0, annulus.r2, 9)[1:-1]
    pts = [c] + [c + s * d for s in shells for d in dirs]
    return np.array([finite_difference_laplacian(f, p, h, extrapolate=True) for p in pts])


def probe_subharmonic_annulus_converse(f, annulus, r_grid=None, q=None, tolerance=Q2_TOLERANCE):
    """Scan ``M_vol(A_x(r1, r2)) - M_sphere(S_r(x))`` for ``r`` in ``[r1, r2]``.

    The finite-difference sign of the Laplacian inside ``B_r2(x)`` is recorded
    alongside.  A field with a mixed-sign Laplacian that still satisfies the
    inequality on the whole grid is flagged as a candidate for inspection.
    """
    _check_annulus(f, annulus)
    q = q or default_quadrature(annulus.dimension)
    if r_grid is None:
        r_grid = chebyshev_grid(annulus.r1, annulus.r2)
    radii = np.asarray(r_grid, dtype=np.float64)
    if radii.size == 0 or np.any(radii < annulus.r1) or np.any(radii > annulus.r2):
        raise UsageError("Q2 grid must lie in [r1, r2]")
    vol = annulus_mean(f, annulus, q).value
    res = np.array([vol - sphere_mean(f, GeometrySpec.sphere(annulus.center, r), q).value for r in radii])
    scale = max(1.0, abs(vol))
    lap = _laplacian_samples(f, annulus, 1e-2 * annulus.r2)
    lap_tol = 1e-6 * max(1.0, float(np.max(np.abs(lap))))
    mixed = bool(np.any(lap < -lap_tol) and np.any(lap > lap_tol))
    holds = bool(np.all(res <= tolerance * scale))
    info = {
        "holds_everywhere": holds,
        "reversed_everywhere": bool(np.all(res >= -tolerance * scale)) and bool(np.any(res > tolerance * scale)),
        "violations": int(np.sum(res > tolerance * scale)),
        "laplacian_min": float(lap.min()),
        "laplacian_max": float(lap.max()),
        "laplacian_mixed_sign": mixed,
        "candidate": mixed and holds,
    }
    return ProbeReport(Q2, getattr(f, "id", "field"), annulus,
                       [(float(r), float(v)) for r, v in zip(radii, res)],
                       sign_change_roots(radii, res, tolerance * scale), None, info)


def _slug(text):
    return re.sub(r"[^A-Za-z0-9.=+-]+", "_", text).strip("_")


def probe_basename(report):
    g = report.geometry
    center = "_".join(f"{c:g}" for c in g.center)
    return _slug(f"{report.conjecture_id}__{report.family_id}__x{center}_r1-{g.r1:g}_r2-{g.r2:g}")


def export_probe(report, out_dir, metadata=None):
    """Write ``<name>.csv`` (``r,residual``) and ``<name>.json``; returns both paths."""
    out_dir = Path(out_dir)
    name = probe_basename(report)
    csv_path = _output.write_csv(out_dir / f"{name}.csv", ["r", "residual"], report.residual_curve)
    payload = {"metadata": metadata or {}, "summary": report.summary()}
    json_path = _output.write_json(out_dir / f"{name}.json", payload)
    return csv_path, json_path
