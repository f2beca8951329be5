"""Acceptance criteria 1-10 as runnable checks.

Each criterion returns a :class:`CriterionResult` whose ``metrics`` hold only
deterministic numbers, so reports from identical runs compare byte for byte.
Wall times live in ``timings`` and are written to the volatile section.
"""
from dataclasses import dataclass, field
import filecmp
import math
import tempfile
import time
from pathlib import Path

import numpy as np

from . import coefficients as co
from .classifier import GridField, classify, classify_grid, family_domain, labeled_corpus
from .conjectures import C3_1, c3_1_constant_residual, probe_weighted_annulus
from .errors import PreconditionError
from .identities import (
    FORWARD_IDENTITIES, GeometryTemplate, IdentityId, PlanItem, check, default_plan, run_suite, sweep_radius,
)
from .quadrature import GeometrySpec, default_quadrature, log_weighted_mean
from .solutions import FieldKind, build_corpus, fundamental
from .specfun import bessel_i, bessel_j_first_zero

# criteria whose failure is documented and expected; anything else failing is unexpected
KNOWN_FAILURES = {8: "annular subharmonic inequality does not hold for spheres near the inner radius"}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    details: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def expected(self):
        return "fail" if self.number in KNOWN_FAILURES else "pass"

    @property
    def as_planned(self):
        return self.passed == (self.expected == "pass")

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        note = " (known failure)" if not self.passed and self.number in KNOWN_FAILURES else ""
        return f"criterion {self.number:2d} {status}{note}: {self.title}"

    def to_dict(self):
        return {
            "criterion": self.number,
            "title": self.title,
            "pass": self.passed,
            "expected": self.expected,
            "metrics": self.metrics,
            "details": self.details,
        }


def _ones(y):
    return np.ones(np.shape(y)[:-1])


def forward_suite(seed=0):
    """Criterion 1."""
    out, ok, details = {}, True, []
    plans = {2: (25, 1e-8), 3: (25, 1e-8), 4: (3, 1e-7), 5: (3, 1e-7)}
    for m, (count, tol) in plans.items():
        rep = run_suite(build_corpus(m), default_plan(FORWARD_IDENTITIES, count), tolerance=tol, seed=seed,
                        roles=("pass",))
        worst = max(g.max_residual for g in rep.groups)
        covered = sorted({g.identity.value for g in rep.groups})
        good = worst <= tol and not rep.unexpected
        ok = ok and good
        out[f"m{m}"] = {"groups": len(rep.groups), "checks": len(rep.reports), "max_residual": worst,
                        "tolerance": tol, "identities": covered}
        if not good:
            details.append(f"m={m}: worst residual {worst:.3g} > {tol:g}")
    return ok, out, details


def rstar_checks():
    """Criterion 2."""
    exact = {3: 14.0 / 9.0, 2: math.exp(4.0 * math.log(2.0) / 3.0 - 0.5)}
    metrics, ok = {}, True
    for m, want in exact.items():
        got = co.r_star(m, 1.0, 2.0)
        field_ = fundamental(m, (0.0,) * m).evaluate
        g = GeometrySpec.annulus((0.0,) * m, 1.0, 2.0)
        res = {}
        for label, factor in (("exact", 1.0), ("minus5", 0.95), ("plus5", 1.05)):
            rep = check(IdentityId.AnnulusRStar, field_, g, {"r": got * factor}, enforce_kind=False)
            res[label] = rep.residual
        good = abs(got - want) <= 1e-14 and res["exact"] <= 1e-8 and res["minus5"] > 1e-4 and res["plus5"] > 1e-4
        ok = ok and good
        metrics[f"m{m}"] = {"r_star": got, "expected": want, "error": abs(got - want), "residuals": res}
    return ok, metrics, []


def weighted_independence():
    """Criterion 3."""
    metrics, ok = {}, True
    for m in (2, 3):
        center = tuple(0.1 * (-1.0) ** i for i in range(m))
        radii = np.linspace(0.05, 0.7, 10)
        for fam in build_corpus(m).of_kind(FieldKind.HARMONIC):
            R = fam.domain[1]
            rs = radii * min(1.0, R)
            c = tuple(np.asarray(fam.domain[0]) + np.asarray(center) * min(1.0, R))
            sw = sweep_radius(IdentityId.WeightedHarmonic, fam, c, rs)
            uc = float(np.asarray(fam(np.asarray(c)[None, :]))[0])
            err = abs(sw.lhs_mean - uc) / max(1.0, abs(uc))
            good = sw.lhs_rel_spread <= 1e-9 and err <= 1e-8
            ok = ok and good
            metrics[fam.id] = {"rel_spread": sw.lhs_rel_spread, "center_error": err}
    return ok, metrics, []


def ball_characterization():
    """Criterion 4."""
    metrics, ok = {}, True
    for m in (2, 3, 4, 5):
        for r in (0.5, 1.0, 2.0):
            mv = log_weighted_mean(_ones, GeometrySpec.ball((0.25,) * m, r), r, default_quadrature(m))
            err = abs(mv.value - 1.0 / m)
            ok = ok and err <= 1e-10
            metrics[f"m{m}_r{r:g}"] = err
    return ok, metrics, []


def coefficient_analytics():
    """Criterion 5."""
    m = {}
    m["a_circ_pan_3_1_error"] = abs(co.a_circ_pan(3, 1.0) - math.sinh(1.0))
    small = (0.0, 1e-8, 1e-6)
    m["a_log_0_error"] = max(abs(co.a_log(t) - 0.5) for t in small)
    m["a_tilde_0_error"] = max(abs(co.a_tilde(t) - 0.5) for t in small)
    t = np.linspace(0.1, 40.0, 400)
    diff = co.a_bullet_pan(2, t) - co.a_log(t)
    m["gap_min"] = float(diff.min())
    m["gap_increasing"] = bool(np.all(np.diff(diff) > 0))
    m["gap_at_1e-3_error"] = abs(float(co.a_bullet_pan(2, 1e-3) - co.a_log(1e-3)) - 0.5)
    tt = np.linspace(0.025, 50.0, 2000)
    at = co.a_tilde(tt)
    m["a_tilde_min"] = float(at.min())
    slope = np.sign(np.diff(at[tt <= 30.0]))
    m["a_tilde_slope_changes"] = int(np.sum(slope[1:] != slope[:-1]))
    # [t I1 - I0 + 1]' = t (I2 + I0) / 2
    ts, h = np.linspace(0.5, 20.0, 40), 1e-4
    g = lambda s: s * bessel_i(1, s) - bessel_i(0, s) + 1.0
    fd = (g(ts + h) - g(ts - h)) / (2 * h)
    exact = ts * (bessel_i(2, ts) + bessel_i(0, ts)) / 2.0
    m["derivative_rel_error"] = float(np.max(np.abs(fd - exact) / np.abs(exact)))
    ok = (m["a_circ_pan_3_1_error"] <= 1e-12 and m["a_log_0_error"] <= 1e-10 and m["a_tilde_0_error"] <= 1e-10
          and m["gap_min"] > 0 and m["gap_increasing"] and m["gap_at_1e-3_error"] <= 1e-6
          and m["a_tilde_min"] > 0 and m["a_tilde_slope_changes"] >= 1 and m["derivative_rel_error"] <= 1e-6)
    return ok, m, []


def meta_precondition():
    """Criterion 6."""
    metrics, ok, details = {}, True, []
    j01 = bessel_j_first_zero(0.0)
    metrics["j01"] = j01
    ok = abs(j01 - 2.4048255577) <= 1e-9
    for m in (2, 3):
        corpus = build_corpus(m)
        for lam in (1.0, 2.0):
            fam = corpus.get(f"meta:cos:lam={lam:g}:d=e1")
            j = bessel_j_first_zero((m - 2) / 2.0)
            key = f"m{m}_lam{lam:g}"
            for factor in (1.0, 1.05):
                r2 = factor * j / lam
                try:
                    check(IdentityId.MetaAnnulus, fam, GeometrySpec.annulus((0.0,) * m, 0.5 * r2, r2),
                          {"r": 0.75 * r2, "lambda": lam})
                    ok = False
                    details.append(f"{key}: no precondition error at lambda*r2 = {factor:g} j")
                except PreconditionError:
                    pass
            r2 = 0.95 * j / lam
            g = GeometrySpec.annulus((0.1,) * m, 0.5 * r2, r2)
            res = max(check(IdentityId.MetaAnnulus, fam, g, {"r": f * r2, "lambda": lam}).residual
                      for f in (0.5, 0.75, 1.0))
            metrics[key] = res
            ok = ok and res <= 1e-8
    return ok, metrics, details


GRID_POINTS = 128


def classifier_checks():
    """Criterion 7."""
    metrics, ok, details = {}, True, []
    for m in (2, 3):
        for fam in labeled_corpus(m):
            res = classify(fam, family_domain(fam))
            gf = GridField.from_function(fam, (-1.0,) * m, (1.0,) * m, (GRID_POINTS,) * m)
            gres = classify_grid(gf)
            entry = {"expected": fam.expected_verdict, "callable": res.verdict, "grid": gres.verdict}
            good = res.verdict == fam.expected_verdict and gres.verdict == fam.expected_verdict
            if fam.parameter is not None:
                e1 = abs(res.parameter_estimate - fam.parameter) / fam.parameter if res.parameter_estimate else math.inf
                e2 = abs(gres.parameter_estimate - fam.parameter) / fam.parameter if gres.parameter_estimate else math.inf
                entry.update(callable_param_error=e1, grid_param_error=e2)
                good = good and e1 <= 1e-3 and e2 <= 1e-2
            if not good:
                details.append(f"{fam.id} (m={m}): {entry}")
            ok = ok and good
            metrics[f"m{m}:{fam.id}"] = entry
    return ok, metrics, details


def negative_controls(seed=0):
    """Criterion 8."""
    metrics, ok, details = {"controls": {}, "inequalities": {}, "y1sq_slack": {}}, True, []
    tol = 1e-8
    for m in (2, 3):
        rep = run_suite(build_corpus(m), default_plan(FORWARD_IDENTITIES), tolerance=tol, seed=seed, roles=("fail",))
        for g in rep.groups:
            good = g.max_residual > 100 * tol
            ok = ok and good
            metrics["controls"][f"m{m}:{g.identity.value}:{g.family_id}"] = g.max_residual
            if not good:
                details.append(f"control {g.family_id} vs {g.identity.value} (m={m}) max residual {g.max_residual:.3g}")
        plan = [PlanItem(i, GeometryTemplate(count=25, sphere_at="uniform"))
                for i in (IdentityId.SubharmonicBallIneq, IdentityId.SubharmonicAnnulusIneq)]
        subs = [f.id for f in build_corpus(m).of_kind(FieldKind.SUBHARMONIC)]
        rep = run_suite(build_corpus(m), plan, tolerance=tol, seed=seed, families=subs, roles=("pass",))
        for g in rep.groups:
            worst = min(r.slack for r in g.reports)
            violations = sum(r.slack < 0 for r in g.reports)
            metrics["inequalities"][f"m{m}:{g.identity.value}:{g.family_id}"] = {"min_slack": worst,
                                                                               "violations": violations}
            if violations:
                ok = False
                details.append(f"{g.identity.value} on {g.family_id} (m={m}): {violations}/{len(g.reports)} "
                               f"geometries with negative slack, min {worst:.3g}")
        fam = build_corpus(m).get(f"sub:y1sq:m{m}")
        for r in (0.25, 0.5, 0.9):
            rep = check(IdentityId.SubharmonicBallIneq, fam, GeometrySpec.ball((0.0,) * m, r))
            closed = 2.0 * r * r / (m * (m + 2))
            err = abs(rep.slack - closed)
            good = rep.slack >= r * r / 8 and err <= 1e-12
            ok = ok and good
            metrics["y1sq_slack"][f"m{m}_r{r:g}"] = {"slack": rep.slack, "closed_form": closed, "error": err}
    return ok, metrics, details


def conjecture_probes():
    """Criterion 9."""
    metrics, ok = {}, True
    for m in (2, 3):
        corpus = build_corpus(m)
        A = GeometrySpec.annulus((0.0,) * m, 1.0, 2.0)
        p = probe_weighted_annulus(C3_1, corpus.get(f"harm:const:m{m}"), A)
        oracle_err = float(np.max(np.abs(p.residuals - c3_1_constant_residual(m, 1.0, 2.0, p.radii))))
        B = GeometrySpec.annulus((0.3,) + (0.2,) * (m - 1), 0.4, 0.8)
        names = (f"harm:coord:m{m}:i1", "harm:poly:m2:k2" if m == 2 else "harm:poly:m3:y1^2-y2^2")
        curves = [probe_weighted_annulus(C3_1, corpus.get(n), B, eps=()) for n in names]
        normed = [c.residuals / c.info["u_center"] for c in curves]
        shape_err = float(np.max(np.abs(normed[0] - normed[1])))
        slopes = p.slopes()
        slope_err = max(abs(s / 10.0 - 1.0) for s in slopes)
        good = len(p.residual_curve) == 50 and oracle_err <= 1e-9 and shape_err <= 1e-8 and slope_err <= 0.2
        ok = ok and good
        metrics[f"m{m}"] = {"oracle_error": oracle_err, "normalized_curve_difference": shape_err,
                            "slopes": slopes, "roots": p.roots}
    return ok, metrics, []


def reproducibility():
    """Criterion 10: identical runs of the CLI give identical reports."""
    from .cli import main, stable_bytes

    commands = [
        ["selftest", "--criteria", "2,4,5,6,9"],
        ["verify", "--m", "2"],
        ["coeffs", "--name", "a_circ_pan", "--m", "3", "--t-max", "10"],
        ["probe", "--conjecture", "3.1", "--m", "2", "--family", "harm:const:m2", "--r1", "1", "--r2", "2"],
    ]
    metrics, ok, details = {}, True, []
    with tempfile.TemporaryDirectory() as tmp:
        dirs = [Path(tmp) / "a", Path(tmp) / "b"]
        for d in dirs:
            for cmd in commands:
                code = main(cmd + ["--out", str(d), "--quiet"])
                if code != 0:
                    ok = False
                    details.append(f"{' '.join(cmd)} exited {code}")
        files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
        other = sorted(p.relative_to(dirs[1]) for p in dirs[1].rglob("*") if p.is_file())
        if files != other:
            ok = False
            details.append("runs produced different file sets")
        for rel in files:
            a, b = dirs[0] / rel, dirs[1] / rel
            same = stable_bytes(a) == stable_bytes(b) if a.suffix == ".json" else filecmp.cmp(a, b, shallow=False)
            metrics[str(rel)] = same
            ok = ok and same
    return ok, metrics, details


CRITERIA = {
    1: ("forward identity suite", forward_suite),
    2: ("r* closed forms and perturbation", rstar_checks),
    3: ("weighted harmonic mean independent of r", weighted_independence),
    4: ("log-weighted mean of 1 equals 1/m", ball_characterization),
    5: ("coefficient analytics", coefficient_analytics),
    6: ("metaharmonic precondition and first zero", meta_precondition),
    7: ("classifier verdicts and parameters", classifier_checks),
    8: ("negative controls and subharmonic inequalities", negative_controls),
    9: ("conjecture probe oracles", conjecture_probes),
    10: ("reproducibility of reports", reproducibility),
}


def run_criterion(n):
    title, fn = CRITERIA[n]
    start = time.perf_counter()
    passed, metrics, details = fn()
    return CriterionResult(n, title, bool(passed), metrics, details, time.perf_counter() - start)


def run_all(numbers=None):
    return [run_criterion(n) for n in (numbers or sorted(CRITERIA))]
