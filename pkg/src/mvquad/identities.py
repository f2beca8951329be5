"""Catalog of mean value identities and inequalities, checkable on any field.

A check evaluates both sides of one identity for a field on one geometry and
records them in an :class:`IdentityReport`.  Residuals and quadrature errors
in reports are relative to ``max(1, |lhs|, |rhs|)``; a check passes when
``residual <= max(tolerance, 10 * quad_error)``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
import math
import os
import zlib

import numpy as np

from . import coefficients as co
from .errors import PreconditionError, UsageError
from .quadrature import (
    GeometrySpec,
    Kind,
    ball_volume,
    default_quadrature,
    log_weighted_mean,
    sphere_mean,
    volume_mean,
)
from .solutions import TEST_RADIUS, FieldKind, SolutionFamily
from .specfun import first_zero_for_dimension

DEFAULT_TOLERANCE = 1e-8
QUAD_ERROR_FACTOR = 10.0


class IdentityId(str, Enum):
    GaussSphere = "GaussSphere"
    GaussBall = "GaussBall"
    AnnulusRStar = "AnnulusRStar"
    AnnulusSphereAllR = "AnnulusSphereAllR"
    BallEqSphere = "BallEqSphere"
    SubharmonicBallIneq = "SubharmonicBallIneq"
    SubharmonicAnnulusIneq = "SubharmonicAnnulusIneq"
    BallCharacterization = "BallCharacterization"
    WeightedHarmonic = "WeightedHarmonic"
    WeightedAnnulusHarmonic = "WeightedAnnulusHarmonic"
    PanSphere = "PanSphere"
    PanBall = "PanBall"
    PanRatio = "PanRatio"
    PanAnnulus = "PanAnnulus"
    MetaSphere = "MetaSphere"
    MetaBall = "MetaBall"
    MetaAnnulus = "MetaAnnulus"
    GreenRep2D = "GreenRep2D"
    WeightedPan = "WeightedPan"
    WeightedPanIneq = "WeightedPanIneq"
    WeightedMeta = "WeightedMeta"


H, P, M_ = FieldKind.HARMONIC, FieldKind.PANHARMONIC, FieldKind.METAHARMONIC
ALL_DIMS = (2, 3, 4, 5)


@dataclass(frozen=True)
class IdentitySpec:
    """Static description of one catalog entry.

    ``hypothesis`` lists the field kinds the identity is proved for; ``None``
    means any C^2 field.  ``parameter`` names the params key carrying mu or
    lambda.  Inequality entries assert ``lhs <= rhs``.
    """

    id: IdentityId
    description: str
    geometry: Kind
    hypothesis: tuple = None
    dims: tuple = ALL_DIMS
    inequality: bool = False
    sphere_radius: bool = False
    parameter: str = None
    field_independent: bool = False
    conjectural: bool = False
    characterizing: bool = True


CATALOG = {
    s.id: s
    for s in (
        IdentitySpec(IdentityId.GaussSphere, "sphere mean equals the centre value", Kind.SPHERE, (H,)),
        IdentitySpec(IdentityId.GaussBall, "ball mean equals the centre value", Kind.BALL, (H,)),
        IdentitySpec(IdentityId.AnnulusRStar, "annulus mean equals the sphere mean at the quadrature radius r*",
                     Kind.ANNULUS, (H,)),
        IdentitySpec(IdentityId.AnnulusSphereAllR, "annulus mean equals the sphere mean for any r in [r1, r2]",
                     Kind.ANNULUS, (H,), sphere_radius=True),
        IdentitySpec(IdentityId.BallEqSphere, "ball mean equals sphere mean of the same radius", Kind.BALL, (H,)),
        IdentitySpec(IdentityId.SubharmonicBallIneq, "ball mean <= sphere mean for subharmonic u", Kind.BALL,
                     (FieldKind.SUBHARMONIC,), inequality=True),
        IdentitySpec(IdentityId.SubharmonicAnnulusIneq, "annulus mean <= sphere mean, r in [r1, r2], subharmonic u",
                     Kind.ANNULUS, (FieldKind.SUBHARMONIC,), inequality=True, sphere_radius=True),
        IdentitySpec(IdentityId.BallCharacterization, "log-weighted mean of 1 over B_r(x) with weight radius r is 1/m",
                     Kind.BALL, None, field_independent=True, characterizing=False),
        IdentitySpec(IdentityId.WeightedHarmonic, "m-scaled log-weighted ball mean equals the centre value",
                     Kind.BALL, (H,)),
        IdentitySpec(IdentityId.WeightedAnnulusHarmonic,
                     "m-scaled log-weighted annulus mean equals the sphere mean (open conjecture)",
                     Kind.ANNULUS, (H,), sphere_radius=True, conjectural=True),
        IdentitySpec(IdentityId.PanSphere, "sphere mean equals a_circ(mu r) u(x)", Kind.SPHERE, (P,), parameter="mu"),
        IdentitySpec(IdentityId.PanBall, "ball mean equals a_bullet(mu r) u(x)", Kind.BALL, (P,), parameter="mu"),
        IdentitySpec(IdentityId.PanRatio, "a_circ(mu r) ball mean equals a_bullet(mu r) sphere mean", Kind.BALL, (P,),
                     parameter="mu"),
        IdentitySpec(IdentityId.PanAnnulus, "annulus mean equals the Bessel-weighted sphere mean", Kind.ANNULUS, (P,),
                     sphere_radius=True, parameter="mu"),
        IdentitySpec(IdentityId.MetaSphere, "sphere mean equals J-type a_circ(lambda r) u(x)", Kind.SPHERE, (M_,),
                     parameter="lambda"),
        IdentitySpec(IdentityId.MetaBall, "ball mean equals J-type a_bullet(lambda r) u(x)", Kind.BALL, (M_,),
                     parameter="lambda"),
        IdentitySpec(IdentityId.MetaAnnulus, "annulus mean equals the J-weighted sphere mean, lambda r2 below j",
                     Kind.ANNULUS, (M_,), sphere_radius=True, parameter="lambda"),
        IdentitySpec(IdentityId.GreenRep2D, "w(x) from circle mean and log-weighted Laplacian (any C^2 w)",
                     Kind.SPHERE, None, dims=(2,), characterizing=False),
        IdentitySpec(IdentityId.WeightedPan, "log-weighted disc average equals a(mu r) u(x)", Kind.BALL, (P,),
                     dims=(2,), parameter="mu"),
        IdentitySpec(IdentityId.WeightedPanIneq, "u(x)/2 < log-weighted disc average for positive panharmonic u",
                     Kind.BALL, (P,), dims=(2,), inequality=True, parameter="mu"),
        IdentitySpec(IdentityId.WeightedMeta, "log-weighted disc average equals a_tilde(lambda r) u(x)", Kind.BALL,
                     (M_,), dims=(2,), parameter="lambda"),
    )
}

FORWARD_IDENTITIES = (
    IdentityId.GaussSphere, IdentityId.GaussBall, IdentityId.AnnulusRStar, IdentityId.AnnulusSphereAllR,
    IdentityId.BallEqSphere, IdentityId.BallCharacterization, IdentityId.WeightedHarmonic, IdentityId.PanSphere,
    IdentityId.PanBall, IdentityId.PanRatio, IdentityId.PanAnnulus, IdentityId.MetaAnnulus, IdentityId.GreenRep2D,
    IdentityId.WeightedPan, IdentityId.WeightedMeta,
)
INEQUALITY_IDENTITIES = (
    IdentityId.SubharmonicBallIneq, IdentityId.SubharmonicAnnulusIneq, IdentityId.WeightedPanIneq,
)


def identity_spec(identity):
    try:
        return CATALOG[IdentityId(identity)]
    except ValueError:
        raise UsageError(f"unknown identity {identity!r}; choose from {[i.value for i in IdentityId]}") from None


@dataclass(frozen=True)
class Sides:
    lhs: float
    rhs: float
    quad_error: float
    u_center: float = None


@dataclass
class IdentityReport:
    identity: IdentityId
    family_id: str
    geometry: GeometrySpec
    params: dict
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    quad_error: float
    passed: bool
    slack: float = None
    expected: str = "pass"

    def to_dict(self):
        return {
            "identity": self.identity.value,
            "family_id": self.family_id,
            "geometry": self.geometry.to_dict(),
            "params": dict(sorted(self.params.items())),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "quad_error": self.quad_error,
            "pass": self.passed,
            "slack": self.slack,
            "expected": self.expected,
        }


def _field_parts(f):
    if isinstance(f, SolutionFamily):
        return f, f.evaluate, f.id
    return None, f, getattr(f, "__name__", "field")


def _parameter(spec, family, params):
    value = params.get(spec.parameter)
    if value is None and family is not None:
        value = family.parameter
    if value is None or not value > 0:
        raise PreconditionError(f"{spec.id.value} needs a positive {spec.parameter!r} parameter")
    return float(value)


def _check_pre(spec, family, g, params, enforce_kind):
    m = g.dimension
    if m not in spec.dims:
        raise PreconditionError(f"{spec.id.value} requires m in {spec.dims}, got {m}")
    allowed = (spec.geometry, Kind.BALL) if spec.id is IdentityId.GreenRep2D else (spec.geometry,)
    if g.kind not in allowed:
        raise UsageError(f"{spec.id.value} needs a {spec.geometry.value} geometry, got {g.kind.value}")
    if family is not None:
        if family.dimension != m:
            raise UsageError(f"family {family.id} has dimension {family.dimension}, geometry has {m}")
        if not family.admits(g):
            raise PreconditionError(f"geometry {g.to_dict()} is not admissible for {family.id}")
        if enforce_kind and spec.hypothesis is not None and not spec.field_independent:
            ok = family.kind in spec.hypothesis
            if spec.inequality and spec.id is not IdentityId.WeightedPanIneq:
                ok = ok or family.laplacian_nonnegative
            if not ok:
                raise UsageError(f"{spec.id.value} needs a {'/'.join(k.value for k in spec.hypothesis)} field, "
                                 f"{family.id} is {family.kind.value}")
    if spec.sphere_radius:
        r = params.get("r")
        if r is None or not g.r1 <= r <= g.r2:
            raise PreconditionError(f"{spec.id.value} needs params['r'] in [r1, r2] = [{g.r1}, {g.r2}]")


def compute_sides(identity, f, g, params=None, q=None, enforce_kind=True):
    """Evaluate both sides of ``identity`` for field ``f`` on geometry ``g``.

    ``f`` is a :class:`SolutionFamily` or a bare vectorised callable (no kind
    or admissibility checks are possible for the latter).
    """
    spec = identity_spec(identity)
    params = dict(params or {})
    q = q or default_quadrature(g.dimension)
    family, u, _ = _field_parts(f)
    _check_pre(spec, family, g, params, enforce_kind)
    m, x, r, r1 = g.dimension, g.center, g.r2, g.r1
    ident = spec.id

    def centre_value():
        return float(np.asarray(u(np.asarray(x)[None, :]))[0])

    def s_mean(radius):
        return sphere_mean(u, GeometrySpec.sphere(x, radius), q)

    def b_mean(radius):
        return volume_mean(u, GeometrySpec.ball(x, radius), q)

    if ident is IdentityId.GaussSphere:
        mv = s_mean(r)
        return Sides(mv.value, centre_value(), mv.error_estimate)
    if ident is IdentityId.GaussBall:
        mv = b_mean(r)
        return Sides(mv.value, centre_value(), mv.error_estimate)
    if ident is IdentityId.BallEqSphere or ident is IdentityId.SubharmonicBallIneq:
        bm, sm = b_mean(r), s_mean(r)
        return Sides(bm.value, sm.value, bm.error_estimate + sm.error_estimate)
    if ident in (IdentityId.AnnulusRStar, IdentityId.AnnulusSphereAllR, IdentityId.SubharmonicAnnulusIneq):
        rs = params.get("r") if ident is not IdentityId.AnnulusRStar else params.get("r", co.r_star(m, r1, r))
        am, sm = volume_mean(u, g, q), s_mean(rs)
        return Sides(am.value, sm.value, am.error_estimate + sm.error_estimate)
    if ident is IdentityId.BallCharacterization:
        one = lambda y: np.ones(np.shape(y)[:-1])
        lw = log_weighted_mean(one, g, r, q)
        return Sides(lw.value, 1.0 / m, lw.error_estimate)
    if ident is IdentityId.WeightedHarmonic:
        lw = log_weighted_mean(u, g, r, q)
        return Sides(m * lw.value, centre_value(), m * lw.error_estimate)
    if ident is IdentityId.WeightedAnnulusHarmonic:
        rw = params["r"]
        lw, sm = log_weighted_mean(u, g, rw, q), s_mean(rw)
        return Sides(m * lw.value, sm.value, m * lw.error_estimate + sm.error_estimate)
    if ident is IdentityId.GreenRep2D:
        lap = family.laplacian if family is not None else params.get("laplacian")
        if lap is None:
            raise UsageError("GreenRep2D needs a field with a Laplacian")
        sm = s_mean(r)
        lw = log_weighted_mean(lap, GeometrySpec.ball(x, r), r, q)
        # (1/2pi) * int_B lap log(r/|x-y|) = (|B| / 2pi) * average = r^2/2 * average
        corr = 0.5 * r * r
        return Sides(centre_value(), sm.value - corr * lw.value, sm.error_estimate + corr * lw.error_estimate)

    p = _parameter(spec, family, params)
    t = p * r
    if ident is IdentityId.PanSphere or ident is IdentityId.MetaSphere:
        coef = co.a_circ_pan(m, t) if ident is IdentityId.PanSphere else _meta_coef(co.a_circ_meta, m, p, r)
        mv = s_mean(r)
        return Sides(mv.value, coef * centre_value(), mv.error_estimate)
    if ident is IdentityId.PanBall or ident is IdentityId.MetaBall:
        coef = co.a_bullet_pan(m, t) if ident is IdentityId.PanBall else _meta_coef(co.a_bullet_meta, m, p, r)
        mv = b_mean(r)
        return Sides(mv.value, coef * centre_value(), mv.error_estimate)
    if ident is IdentityId.PanRatio:
        bm, sm = b_mean(r), s_mean(r)
        ac, ab = co.a_circ_pan(m, t), co.a_bullet_pan(m, t)
        return Sides(ac * bm.value, ab * sm.value, ac * bm.error_estimate + ab * sm.error_estimate)
    if ident is IdentityId.PanAnnulus or ident is IdentityId.MetaAnnulus:
        kind = co.PAN if ident is IdentityId.PanAnnulus else co.META
        coef = co.annulus_coeff(kind, m, p, r1, r, params["r"])
        am, sm = volume_mean(u, g, q), s_mean(params["r"])
        return Sides(am.value, coef * sm.value, am.error_estimate + abs(coef) * sm.error_estimate)
    if ident in (IdentityId.WeightedPan, IdentityId.WeightedMeta, IdentityId.WeightedPanIneq):
        lw = log_weighted_mean(u, g, r, q)
        uc = centre_value()
        if ident is IdentityId.WeightedPanIneq:
            return Sides(0.5 * uc, lw.value, lw.error_estimate, u_center=uc)
        coef = co.a_log(t) if ident is IdentityId.WeightedPan else co.a_tilde(t)
        return Sides(lw.value, coef * uc, lw.error_estimate)
    raise UsageError(f"no evaluator for {ident.value}")  # pragma: no cover


def _meta_coef(fn, m, lam, r):
    j = first_zero_for_dimension(m)
    if lam * r >= j:
        raise PreconditionError(f"metaharmonic sphere/ball identity needs lambda*r < j_{{(m-2)/2,1}} = {j!r}")
    return fn(m, lam * r)


def check(identity, f, g, params=None, q=None, tolerance=DEFAULT_TOLERANCE, enforce_kind=True, expected="pass"):
    """Evaluate ``identity`` and decide pass/fail under the tolerance policy."""
    spec = identity_spec(identity)
    params = dict(params or {})
    sides = compute_sides(spec.id, f, g, params, q, enforce_kind=enforce_kind)
    scale = max(1.0, abs(sides.lhs), abs(sides.rhs))
    qerr = sides.quad_error / scale
    threshold = max(tolerance, QUAD_ERROR_FACTOR * qerr)
    slack = None
    if spec.inequality:
        slack = sides.rhs - sides.lhs
        residual = max(0.0, -slack) / scale
        passed = residual <= threshold
        if spec.id is IdentityId.WeightedPanIneq and sides.u_center > 0:
            passed = passed and slack / scale > max(tolerance, QUAD_ERROR_FACTOR * qerr)
    else:
        residual = abs(sides.lhs - sides.rhs) / scale
        passed = residual <= threshold
    _, _, fid = _field_parts(f)
    return IdentityReport(
        spec.id, fid, g, _jsonable_params(params), float(sides.lhs), float(sides.rhs), float(residual),
        float(tolerance), float(qerr), bool(passed), None if slack is None else float(slack), expected,
    )


def _jsonable_params(params):
    return {k: v for k, v in params.items() if isinstance(v, (int, float, str, bool)) or v is None}


@dataclass
class SweepResult:
    reports: list
    lhs_mean: float
    lhs_rel_variance: float
    lhs_rel_spread: float

    @property
    def all_passed(self):
        return all(r.passed for r in self.reports)


def sweep_radius(identity, f, center, radii, params=None, q=None, tolerance=DEFAULT_TOLERANCE):
    """One check per radius.

    Sphere and ball identities use the radius as ``r``; annulus identities
    take ``r1``, ``r2`` from ``params`` and use the radius as the sphere radius.
    """
    spec = identity_spec(identity)
    params = dict(params or {})
    reports = []
    for r in radii:
        if spec.geometry is Kind.ANNULUS:
            g = GeometrySpec.annulus(center, params["r1"], params["r2"])
            p = {k: v for k, v in params.items() if k not in ("r1", "r2")}
            p["r"] = float(r)
        elif spec.geometry is Kind.SPHERE:
            g, p = GeometrySpec.sphere(center, r), params
        else:
            g, p = GeometrySpec.ball(center, r), params
        reports.append(check(spec.id, f, g, p, q, tolerance))
    lhs = np.array([rep.lhs for rep in reports])
    mean = float(lhs.mean())
    denom = max(1.0, abs(mean))
    return SweepResult(reports, mean, float(lhs.var() / denom**2), float((lhs.max() - lhs.min()) / denom))


@dataclass(frozen=True)
class GeometryTemplate:
    """Recipe for ``count`` random admissible geometries inside a family's domain.

    Centres are drawn in the ball of radius ``center_fraction * R`` and outer
    radii up to ``0.95 * (R - |x - c|)``, where ``R`` is the family's domain
    radius capped at ``test_radius``.  ``sphere_at`` places the sphere radius
    of annulus identities: uniformly in ``[r1, r2]`` or at ``r2``.
    """

    count: int = 25
    center_fraction: float = 0.5
    test_radius: float = TEST_RADIUS
    sphere_at: str = "uniform"

    def __post_init__(self):
        if self.sphere_at not in ("uniform", "outer"):
            raise UsageError("sphere_at must be 'uniform' or 'outer'")

    def generate(self, spec, family, seed, params=None):
        params = params or {}
        m = family.dimension
        c0, radius = family.domain
        R = min(radius, self.test_radius)
        rng = np.random.default_rng([seed, zlib.crc32(f"{spec.id.value}|{family.id}".encode())])
        lam = None
        if spec.parameter == "lambda":
            lam = params.get("lambda", family.parameter) or 1.0
        out = []
        for _ in range(self.count):
            d = rng.normal(size=m)
            d /= np.linalg.norm(d)
            x = np.asarray(c0) + d * self.center_fraction * R * rng.uniform() ** (1.0 / m)
            avail = R - float(np.linalg.norm(x - np.asarray(c0)))
            r2 = rng.uniform(0.3, 0.95) * avail
            if lam is not None:
                r2 = min(r2, 0.95 * first_zero_for_dimension(m) / lam)
            r1 = rng.uniform(0.2, 0.8) * r2
            r = rng.uniform(r1, r2)
            p = {}
            if spec.geometry is Kind.SPHERE:
                g = GeometrySpec.sphere(tuple(x), r2)
            elif spec.geometry is Kind.BALL:
                g = GeometrySpec.ball(tuple(x), r2)
            else:
                g = GeometrySpec.annulus(tuple(x), r1, r2)
                if spec.sphere_radius:
                    p["r"] = float(r2 if self.sphere_at == "outer" else r)
            out.append((g, p))
        return out


@dataclass(frozen=True)
class PlanItem:
    identity: IdentityId
    template: GeometryTemplate = GeometryTemplate()
    params: dict = field(default_factory=dict)


def default_plan(identities=FORWARD_IDENTITIES + INEQUALITY_IDENTITIES, count=25):
    """Plan used by ``verify``.

    The annular subharmonic inequality is only valid for the outer sphere in
    general (sphere means of a subharmonic function increase with the
    radius, so the annulus mean exceeds the inner sphere mean for ``|y|**2``),
    so the default plan checks it at ``r = r2``.
    """
    plan = []
    for i in identities:
        i = IdentityId(i)
        at = "outer" if i is IdentityId.SubharmonicAnnulusIneq else "uniform"
        plan.append(PlanItem(i, GeometryTemplate(count=count, sphere_at=at)))
    return plan


NEGATIVE_CONTROL_PARAMS = {"mu": 1.0, "lambda": 1.0}


def role(spec, family):
    """``"pass"`` if the identity must hold for the family, ``"fail"`` for a
    negative control that must fail somewhere, ``None`` to skip."""
    if family.dimension not in spec.dims or spec.conjectural:
        return None
    if spec.field_independent:
        return "pass" if family.id.startswith("harm:const") else None
    if spec.hypothesis is None:
        return "pass"
    if spec.id is IdentityId.WeightedPanIneq:
        return "pass" if family.kind is FieldKind.PANHARMONIC else None
    if spec.inequality:
        return "pass" if family.laplacian_nonnegative and family.kind in (
            FieldKind.HARMONIC, FieldKind.SUBHARMONIC, FieldKind.NONE) else None
    if family.kind in spec.hypothesis:
        return "pass"
    if family.kind is FieldKind.NONE and spec.characterizing:
        return "fail"
    return None


@dataclass
class GroupResult:
    identity: IdentityId
    family_id: str
    expected: str
    reports: list

    @property
    def max_residual(self):
        return max((r.residual for r in self.reports), default=0.0)

    @property
    def as_planned(self):
        if self.expected == "pass":
            return all(r.passed for r in self.reports)
        return any(not r.passed for r in self.reports)

    def to_dict(self):
        return {
            "identity": self.identity.value,
            "family_id": self.family_id,
            "expected": self.expected,
            "checks": len(self.reports),
            "failed_checks": sum(not r.passed for r in self.reports),
            "max_residual": self.max_residual,
            "as_planned": self.as_planned,
        }


@dataclass
class SuiteReport:
    groups: list
    metadata: dict = field(default_factory=dict)

    @property
    def reports(self):
        return [r for g in self.groups for r in g.reports]

    @property
    def unexpected(self):
        return [g for g in self.groups if not g.as_planned]

    def summary(self):
        reps = self.reports
        return {
            "groups": len(self.groups),
            "checks": len(reps),
            "passed_checks": sum(r.passed for r in reps),
            "expected_fail_groups": sum(g.expected == "fail" for g in self.groups),
            "unexpected_groups": len(self.unexpected),
        }

    def to_dict(self):
        return {
            "metadata": self.metadata,
            "summary": self.summary(),
            "groups": [g.to_dict() for g in self.groups],
            "reports": [r.to_dict() for r in self.reports],
        }


def worker_count():
    env = os.environ.get("MVQ_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            return max(1, min(int(env), cap))
        except ValueError:
            raise UsageError(f"MVQ_THREADS must be an integer, got {env!r}") from None
    return cap


def run_suite(manifest, plan, q=None, tolerance=DEFAULT_TOLERANCE, seed=0, families=None, roles=("pass", "fail")):
    """Run every plan item against every applicable family of ``manifest``.

    Negative controls (kind-None families against characterizing equalities)
    are expected to fail on at least one geometry; ``roles`` selects which of
    the two kinds of group to run.  Group order follows the plan and then the
    manifest, whatever order the workers finish in.
    """
    q = q or default_quadrature(manifest.dimension)
    jobs = []
    for item in plan:
        spec = identity_spec(item.identity)
        for fam in manifest:
            if families is not None and fam.id not in families:
                continue
            expected = role(spec, fam)
            if expected not in roles:
                continue
            params = dict(item.params)
            if expected == "fail" and spec.parameter:
                params.setdefault(spec.parameter, NEGATIVE_CONTROL_PARAMS[spec.parameter])
            jobs.append((spec, fam, expected, params, item.template))

    def run(job):
        spec, fam, expected, params, template = job
        reports = []
        for g, extra in template.generate(spec, fam, seed, params):
            reports.append(check(spec.id, fam, g, {**params, **extra}, q, tolerance,
                                 enforce_kind=expected == "pass", expected=expected))
        return GroupResult(spec.id, fam.id, expected, reports)

    workers = min(worker_count(), max(1, len(jobs)))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            groups = list(pool.map(run, jobs))
    else:
        groups = [run(j) for j in jobs]
    meta = {
        "corpus_version": manifest.version,
        "dimension": manifest.dimension,
        "quadrature": q.to_dict(),
        "seed": seed,
        "tolerance": tolerance,
    }
    return SuiteReport(groups, meta)
