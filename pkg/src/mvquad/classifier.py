"""Decide the PDE class of a black-box field from its mean values.

The sphere-mean ratio ``rho = M_sphere(S_r(x)) / u(x)`` equals 1 for harmonic
fields, ``a_circ_pan(m, mu r) > 1`` for panharmonic and
``a_circ_meta(m, lam r) < 1`` for metaharmonic ones.  Both curves are monotone
on the branches used here, so each probe inverts to a parameter by
bisection.  The candidate class is then confirmed by the matching sphere and
ball identities on every probe; a field failing them but satisfying the
ball <= sphere inequality everywhere is reported as subharmonic.
"""
from dataclasses import dataclass, field, asdict
import csv
import math
from pathlib import Path

import numpy as np

from . import _kernels
from .coefficients import a_circ_meta, a_circ_pan
from .errors import EstimationError, LatticeError, UsageError
from .identities import IdentityId, check
from .quadrature import GeometrySpec, Kind, default_quadrature, sphere_mean
from .specfun import T_MAX, check_dimension, first_zero_for_dimension

HARMONIC, PANHARMONIC, METAHARMONIC = "Harmonic", "Panharmonic", "Metaharmonic"
SUBHARMONIC, UNCLASSIFIED = "Subharmonic", "Unclassified"
MIN_GRID_POINTS = 16
MIN_CLASSIFY_GRID_POINTS = 64
PROBE_CENTER_OFFSET = 0.3
PROBE_RADII = (0.2, 0.35, 0.5)


LABELED_FAMILIES = (
    "harm:poly:{poly}", "harm:fund:m{m}",
    "pan:exp:mu=0.5:d=e1", "pan:exp:mu=2:d=e1", "pan:exp:mu=1:d=diag", "pan:radial:mu=1:m{m}",
    "meta:cos:lam=2:d=e1", "meta:sin:lam=1:d=e1", "meta:radial:lam=1:m{m}",
    "sub:normsq:m{m}", "none:exp+sq:m{m}", "none:quartic-mixed:m{m}",
)


def labeled_corpus(m):
    """Twelve corpus families covering every verdict, for classifier validation."""
    from .solutions import build_corpus

    corpus = build_corpus(m)
    poly = "m2:k3" if m == 2 else f"m{m}:y1^2-y2^2"
    return [corpus.get(fid.format(m=m, poly=poly)) for fid in LABELED_FAMILIES]


def family_domain(family, radius=1.0):
    """Ball of radius ``min(radius, safe radius)`` about the family's domain centre."""
    center, safe = family.domain
    return GeometrySpec.ball(center, min(radius, safe))


@dataclass(frozen=True)
class Thresholds:
    equality: float = 1e-6
    subharmonic: float = 1e-9
    center_fraction: float = 0.1


GRID_THRESHOLDS = Thresholds(equality=1e-3, subharmonic=1e-4)


@dataclass
class ClassificationResult:
    verdict: str
    parameter_estimate: float
    parameter_spread: float
    evidence: list
    thresholds: Thresholds
    kind_hint: str = None
    diagnostics: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "parameter_estimate": self.parameter_estimate,
            "parameter_spread": self.parameter_spread,
            "kind_hint": self.kind_hint,
            "thresholds": asdict(self.thresholds),
            "diagnostics": list(self.diagnostics),
            "info": self.info,
            "evidence": [r.to_dict() for r in self.evidence],
        }


def invert_monotone(fn, target, lo, hi, increasing=True):
    """Solve ``fn(t) = target`` on ``[lo, hi]`` by bisection to machine precision."""
    f_lo, f_hi = fn(lo), fn(hi)
    if increasing and not f_lo <= target <= f_hi or not increasing and not f_hi <= target <= f_lo:
        raise EstimationError(f"target {target} outside the curve range on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if (fn(mid) < target) == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def invert_pan(m, rho):
    """``t`` with ``a_circ_pan(m, t) = rho`` for ``rho >= 1``."""
    if rho < 1.0:
        raise EstimationError("panharmonic ratio must be >= 1")
    return invert_monotone(lambda t: a_circ_pan(m, t), rho, 0.0, T_MAX)


def invert_meta(m, rho):
    """``t`` in ``(0, j)`` with ``a_circ_meta(m, t) = rho`` for ``0 < rho <= 1``."""
    if not 0.0 < rho <= 1.0:
        raise EstimationError(f"ratio {rho} is off the first metaharmonic branch")
    return invert_monotone(lambda t: a_circ_meta(m, t), rho, 0.0, first_zero_for_dimension(m), increasing=False)


@dataclass
class ParameterEstimate:
    kind_hint: str
    estimate: float
    spread: float
    ratios: list
    diagnostics: list = field(default_factory=list)


def estimate_parameter(u, centers, radii, q=None, thresholds=Thresholds()):
    """Estimate the class hint and mu or lambda from sphere-mean ratios.

    Centres with ``|u(x)| < center_fraction * max|u|`` are skipped; the
    estimate is the median over probes and the spread their interquartile range.
    """
    centers = [tuple(map(float, c)) for c in centers]
    m = check_dimension(len(centers[0]))
    q = q or default_quadrature(m)
    values = np.asarray(u(np.asarray(centers)), dtype=np.float64)
    peak = float(np.max(np.abs(values)))
    keep = [i for i, v in enumerate(values) if peak > 0 and abs(v) >= thresholds.center_fraction * peak]
    if not keep:
        raise EstimationError("every probe centre has |u(x)| too small for a ratio estimate")
    probes = []
    for i in keep:
        for r in radii:
            mv = sphere_mean(u, GeometrySpec.sphere(centers[i], r), q)
            probes.append((i, float(r), mv.value / values[i]))
    dev = np.array([rho - 1.0 for _, _, rho in probes])
    ratios = [{"center": list(centers[i]), "r": r, "ratio": rho} for i, r, rho in probes]
    tol = thresholds.equality
    if np.all(np.abs(dev) <= tol):
        return ParameterEstimate(HARMONIC, None, 0.0, ratios)
    signs = np.sign(dev[np.abs(dev) > tol])
    diagnostics = []
    if np.all(signs > 0):
        hint, invert = PANHARMONIC, invert_pan
    elif np.all(signs < 0):
        hint, invert = METAHARMONIC, invert_meta
    else:
        return ParameterEstimate(None, None, 0.0, ratios, ["sphere-mean ratios straddle 1"])
    params = []
    for _, r, rho in probes:
        try:
            params.append(invert(m, rho) / r)
        except EstimationError as exc:
            diagnostics.append(f"r={r}: {exc}")
    if not params:
        return ParameterEstimate(None, None, 0.0, ratios, diagnostics + ["no invertible probe ratios"])
    if hint == METAHARMONIC and diagnostics:
        diagnostics.append("lambda r beyond the first Bessel branch")
        return ParameterEstimate(None, None, 0.0, ratios, diagnostics)
    params = np.asarray(params)
    q75, q25 = np.percentile(params, [75, 25])
    return ParameterEstimate(hint, float(np.median(params)), float(q75 - q25), ratios, diagnostics)


def probe_layout(domain):
    """Probe centres (domain centre, axis and diagonal offsets) and radii for a ball domain."""
    c, R = np.asarray(domain.center), domain.r2
    m = domain.dimension
    alternating = np.array([(-1.0) ** i for i in range(m)])
    generic = np.arange(1.0, m + 1.0)
    directions = list(np.eye(m)) + [np.ones(m) / math.sqrt(m), alternating / math.sqrt(m),
                                    generic / np.linalg.norm(generic)]
    centers = [tuple(c)]
    for d in directions:
        for sgn in (1.0, -1.0):
            centers.append(tuple(c + sgn * PROBE_CENTER_OFFSET * R * d))
    radii = [f * R for f in PROBE_RADII]
    return centers, radii


SUB_LATTICE_STEP = 0.25
SUB_LATTICE_EXTENT = 0.75
SUB_RADIUS = 0.2


def subharmonic_probes(domain):
    """Small balls on a lattice covering the domain, for the inequality stage.

    Large probe balls average the Laplacian and can hide regions where it is
    negative, so the inequality is also checked on radius ``0.2 R`` balls
    centred on a ``0.25 R`` lattice inside ``|x - c| <= 0.75 R``.
    """
    c, R = np.asarray(domain.center), domain.r2
    n = int(round(SUB_LATTICE_EXTENT / SUB_LATTICE_STEP))
    ticks = SUB_LATTICE_STEP * np.arange(-n, n + 1)
    mesh = np.stack(np.meshgrid(*[ticks] * domain.dimension, indexing="ij"), axis=-1).reshape(-1, domain.dimension)
    inside = mesh[np.linalg.norm(mesh, axis=1) <= SUB_LATTICE_EXTENT + 1e-12]
    return [(tuple(c + R * x), SUB_RADIUS * R) for x in inside]


def classify(u, domain, q=None, thresholds=Thresholds()):
    """Classify ``u`` on the ball ``domain``.

    Returns Harmonic, Panharmonic or Metaharmonic (with the parameter) when
    the corresponding sphere and ball identities hold at every probe within
    ``thresholds.equality``; otherwise Subharmonic if the ball mean never
    exceeds the sphere mean on the probes and on a lattice of small balls,
    else Unclassified.
    """
    if domain.kind is not Kind.BALL:
        raise UsageError("classify needs a Ball domain")
    m = domain.dimension
    q = q or default_quadrature(m)
    centers, radii = probe_layout(domain)
    if PROBE_CENTER_OFFSET + max(PROBE_RADII) >= 1.0 or domain.r2 <= 0:
        raise UsageError("domain too small for an admissible probe")
    try:
        est = estimate_parameter(u, centers, radii, q, thresholds)
    except EstimationError as exc:
        est = ParameterEstimate(None, None, 0.0, [], [str(exc)])
    evidence, diagnostics = [], list(est.diagnostics)
    probes = [(c, r) for c in centers for r in radii]

    def verify(ids, params):
        # stops at the first failing probe; its report closes the evidence
        for ident in ids:
            for c, r in probes:
                geom = GeometrySpec.sphere(c, r) if ident in _SPHERE_IDS else GeometrySpec.ball(c, r)
                rep = check(ident, u, geom, params, q, thresholds.equality, enforce_kind=False)
                evidence.append(rep)
                if rep.residual > thresholds.equality:
                    return False
        return True

    # the harmonic identities are tried first: a parameter so small that the
    # pan/meta identities cannot be told from the harmonic ones at this
    # threshold is not resolvable, and Harmonic is the simpler verdict
    verdict, parameter = None, None
    if verify((IdentityId.GaussSphere, IdentityId.GaussBall), {}):
        verdict = HARMONIC
        if est.kind_hint not in (HARMONIC, None):
            diagnostics.append(f"ratio hint {est.kind_hint} with estimate {est.estimate!r} is "
                               "indistinguishable from harmonic at this threshold")
    elif est.kind_hint == PANHARMONIC:
        if verify((IdentityId.PanSphere, IdentityId.PanBall), {"mu": est.estimate}):
            verdict, parameter = PANHARMONIC, est.estimate
    elif est.kind_hint == METAHARMONIC:
        j = first_zero_for_dimension(m)
        if est.estimate * max(radii) >= j:
            diagnostics.append("estimated lambda puts probe radii beyond the first Bessel zero")
        elif verify((IdentityId.MetaSphere, IdentityId.MetaBall), {"lambda": est.estimate}):
            verdict, parameter = METAHARMONIC, est.estimate
    if verdict is None:
        verdict = SUBHARMONIC
        for c, r in probes + subharmonic_probes(domain):
            rep = check(IdentityId.SubharmonicBallIneq, u, GeometrySpec.ball(c, r), {}, q,
                        thresholds.subharmonic, enforce_kind=False)
            evidence.append(rep)
            if rep.residual > thresholds.subharmonic:
                verdict = UNCLASSIFIED
                break
    spread = est.spread if parameter is not None else 0.0
    return ClassificationResult(verdict, parameter, spread, evidence, thresholds, est.kind_hint, diagnostics)


_SPHERE_IDS = (IdentityId.GaussSphere, IdentityId.PanSphere, IdentityId.MetaSphere)


@dataclass(frozen=True, eq=False)
class GridField:
    """Samples of a field on a uniform axis-aligned lattice, C (row-major) order."""

    lo: tuple
    hi: tuple
    counts: tuple
    values: np.ndarray

    def __post_init__(self):
        m = check_dimension(len(self.counts))
        if len(self.lo) != m or len(self.hi) != m:
            raise UsageError("box corners must match the grid dimension")
        if any(n < MIN_GRID_POINTS for n in self.counts):
            raise UsageError(f"grids need at least {MIN_GRID_POINTS} points per axis, got {self.counts}")
        if any(not b > a for a, b in zip(self.lo, self.hi)):
            raise UsageError("grid box is degenerate")
        vals = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        if vals.size != math.prod(self.counts):
            raise UsageError("value count does not match the lattice")
        object.__setattr__(self, "values", vals)

    @property
    def dimension(self):
        return len(self.counts)

    @property
    def step(self):
        return tuple((b - a) / (n - 1) for a, b, n in zip(self.lo, self.hi, self.counts))

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        flat = y.reshape(-1, self.dimension)
        out = _kernels.multilinear(self.values, np.asarray(self.lo), np.asarray(self.step),
                                   np.asarray(self.counts), flat)
        return out.reshape(y.shape[:-1])

    def axes(self):
        return [np.linspace(a, b, n) for a, b, n in zip(self.lo, self.hi, self.counts)]

    @classmethod
    def from_function(cls, f, lo, hi, counts):
        axes = [np.linspace(a, b, n) for a, b, n in zip(lo, hi, counts)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return cls(tuple(lo), tuple(hi), tuple(counts), np.asarray(f(mesh)).ravel())

    def write_csv(self, path):
        path = Path(path)
        mesh = np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1).reshape(-1, self.dimension)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"x{i + 1}" for i in range(self.dimension)] + ["u"])
            for pt, v in zip(mesh, self.values):
                w.writerow([f"{c:.17g}" for c in pt] + [f"{v:.17g}"])
        return path

    @classmethod
    def from_csv(cls, path):
        """Read ``x1,...,xm,u`` rows forming a uniform lattice in row-major order."""
        with Path(path).open(newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise LatticeError("empty grid file", 1)
        header = [h.strip() for h in rows[0]]
        m = len(header) - 1
        if m < 2 or header != [f"x{i + 1}" for i in range(m)] + ["u"]:
            raise LatticeError(f"header must be x1,...,xm,u; got {','.join(header)}", 1)
        check_dimension(m)
        data = []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != m + 1:
                raise LatticeError(f"expected {m + 1} columns, got {len(row)}", lineno)
            try:
                data.append((lineno, [float(c) for c in row]))
            except ValueError:
                raise LatticeError(f"non-numeric entry in {row}", lineno) from None
        if not data:
            raise LatticeError("no data rows", 1)
        arr = np.array([d for _, d in data])
        lines = [ln for ln, _ in data]
        axes = []
        for k in range(m):
            vals = np.unique(arr[:, k])
            if len(vals) < 2:
                raise LatticeError(f"axis x{k + 1} has a single value", lines[0])
            axes.append(vals)
        # in a full lattice every value of an axis repeats equally often; a
        # rarer value that is also off the spacing of the common ones is a stray row
        rogue = []
        for k, a in enumerate(axes):
            mult = np.array([np.count_nonzero(arr[:, k] == v) for v in a])
            core = a[mult == mult.max()]
            if len(core) < 2:
                continue
            h = np.min(np.diff(core))
            for v in a[mult < mult.max()]:
                off = (v - core[0]) / h
                if abs(off - round(off)) > 1e-6:
                    rogue.append(int(np.flatnonzero(arr[:, k] == v)[0]))
        if rogue:
            i = min(rogue)
            raise LatticeError(f"point {arr[i, :m].tolist()} is off the lattice", lines[i])
        counts = tuple(len(a) for a in axes)
        lo = tuple(float(a[0]) for a in axes)
        hi = tuple(float(a[-1]) for a in axes)
        for k, a in enumerate(axes):
            step = (a[-1] - a[0]) / (len(a) - 1)
            bad = np.flatnonzero(np.abs(np.diff(a) - step) > 1e-6 * step)
            if bad.size:
                value = a[bad[0] + 1]
                first = int(np.flatnonzero(arr[:, k] == value)[0])
                raise LatticeError(f"axis x{k + 1} is not uniformly spaced near {value!r}", lines[first])
        expected = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
        n = min(len(arr), len(expected))
        tol = 1e-9 * max(1.0, max(abs(v) for v in lo + hi))
        mism = np.flatnonzero(np.any(np.abs(arr[:n, :m] - expected[:n]) > tol, axis=1))
        if mism.size:
            i = int(mism[0])
            raise LatticeError(f"point {arr[i, :m].tolist()} breaks row-major lattice order "
                               f"(expected {expected[i].tolist()})", lines[i])
        if len(arr) != len(expected):
            where = lines[n] if len(arr) > n else lines[-1] + 1
            raise LatticeError(f"lattice {counts} needs {len(expected)} rows, found {len(arr)}", where)
        return cls(lo, hi, counts, arr[:, m])


def inscribed_ball(gf, fraction=0.95):
    c = tuple(0.5 * (a + b) for a, b in zip(gf.lo, gf.hi))
    r = fraction * 0.5 * min(b - a for a, b in zip(gf.lo, gf.hi))
    return GeometrySpec.ball(c, r)


def classify_grid(gf, q=None, thresholds=GRID_THRESHOLDS):
    """Classify sampled data through its multilinear interpolant."""
    if min(gf.counts) < MIN_CLASSIFY_GRID_POINTS:
        raise UsageError(f"grid resolution {gf.counts} below the minimum of "
                         f"{MIN_CLASSIFY_GRID_POINTS} points per axis")
    result = classify(gf, inscribed_ball(gf), q, thresholds)
    result.info["grid"] = {"counts": list(gf.counts), "spacing": list(gf.step), "interpolation": "multilinear"}
    return result
