import json
import math

import numpy as np
import pytest

from mvquad import _output
from mvquad.errors import PreconditionError, UsageError
from mvquad.identities import (
    CATALOG, FORWARD_IDENTITIES, GeometryTemplate, IdentityId, PlanItem, check, compute_sides, default_plan,
    identity_spec, run_suite, sweep_radius,
)
from mvquad.quadrature import GeometrySpec
from mvquad.solutions import build_corpus, fundamental, lookup
from mvquad.specfun import bessel_i, bessel_j_first_zero


def test_catalog_dimension_constraints():
    for ident in (IdentityId.GreenRep2D, IdentityId.WeightedPan, IdentityId.WeightedPanIneq, IdentityId.WeightedMeta):
        assert CATALOG[ident].dims == (2,)
    assert len(FORWARD_IDENTITIES) == 15
    assert identity_spec("PanBall").parameter == "mu"
    assert CATALOG[IdentityId.WeightedAnnulusHarmonic].conjectural


def test_gauss_sphere_harmonic_polynomial():
    f = lookup("harm:poly:m2:k3")
    rep = check(IdentityId.GaussSphere, f, GeometrySpec.sphere((0.1, 0.2), 0.7))
    assert rep.passed and rep.lhs == pytest.approx(0.1**3 - 3 * 0.1 * 0.2**2, abs=1e-14)


def test_green_rep_y1sq():
    sides = compute_sides(IdentityId.GreenRep2D, lookup("sub:y1sq:m2"), GeometrySpec.sphere((0, 0), 0.8),
                          enforce_kind=False)
    assert sides.lhs == 0.0 and abs(sides.rhs) <= 1e-13


@pytest.mark.parametrize("r", [0.3, 0.7, 1.2])
def test_pan_sphere_against_1d_oracle(r):
    f = lookup("pan:exp:mu=1:d=e1")
    x = (0.2, -0.4)
    sides = compute_sides(IdentityId.PanSphere, f, GeometrySpec.sphere(x, r))
    theta = np.linspace(0, 2 * np.pi, 4001)
    oracle = math.exp(x[0]) * np.trapezoid(np.exp(r * np.cos(theta)), theta) / (2 * np.pi)
    assert abs(sides.lhs - oracle) <= 1e-9
    assert sides.rhs == pytest.approx(bessel_i(0, r) * math.exp(x[0]), rel=1e-14)


def test_subharmonic_ball_slack_closed_form():
    f = lookup("sub:y1sq:m2")
    for x1, r in ((0.0, 0.5), (0.3, 0.4)):
        rep = check(IdentityId.SubharmonicBallIneq, f, GeometrySpec.ball((x1, 0.1), r))
        assert rep.passed and rep.slack == pytest.approx(r * r / 4, abs=1e-13)
        assert rep.lhs == pytest.approx(x1**2 + r * r / 4, abs=1e-13)


def test_gauss_ball_fails_on_normsq():
    rep = check(IdentityId.GaussBall, lookup("sub:normsq:m2"), GeometrySpec.ball((0, 0), 0.8), enforce_kind=False)
    assert not rep.passed and rep.residual == pytest.approx(0.32, rel=1e-13)


def test_meta_annulus_precondition():
    f = lookup("meta:cos:lam=1:d=e1")
    with pytest.raises(PreconditionError):
        check(IdentityId.MetaAnnulus, f, GeometrySpec.annulus((0, 0), 1.0, 2.5), {"r": 2.0})
    j = bessel_j_first_zero(0)
    rep = check(IdentityId.MetaAnnulus, f, GeometrySpec.annulus((0, 0), 1.0, 0.95 * j), {"r": 2.0})
    assert rep.passed and rep.residual <= 1e-8


def test_kind_and_geometry_errors():
    with pytest.raises(UsageError):
        check(IdentityId.PanSphere, lookup("harm:poly:m2:k2"), GeometrySpec.sphere((0, 0), 0.5))
    with pytest.raises(UsageError):
        check(IdentityId.GaussSphere, lookup("harm:poly:m2:k2"), GeometrySpec.ball((0, 0), 0.5))
    with pytest.raises(PreconditionError):
        check(IdentityId.GaussSphere, lookup("harm:fund:m2"), GeometrySpec.sphere((0.5, 0), 0.6))
    with pytest.raises(PreconditionError):
        check(IdentityId.GreenRep2D, lookup("harm:fund:m3"), GeometrySpec.sphere((0, 0, 0), 0.5))
    with pytest.raises(PreconditionError):
        check(IdentityId.AnnulusSphereAllR, lookup("harm:poly:m2:k2"), GeometrySpec.annulus((0, 0), 0.2, 0.5),
              {"r": 0.6})


def test_inequality_policy():
    f = lookup("pan:exp:mu=1:d=e1")
    rep = check(IdentityId.WeightedPanIneq, f, GeometrySpec.ball((0, 0), 0.8))
    assert rep.passed and rep.slack > 0 and rep.residual == 0.0
    rep = check(IdentityId.SubharmonicBallIneq, lambda y: -np.sum(y**2, axis=-1), GeometrySpec.ball((0, 0), 0.8))
    assert not rep.passed and rep.residual == pytest.approx(0.64 * 2 / 4, rel=1e-12)


def test_annulus_rstar_on_pole_centred_fundamental():
    for m in (2, 3):
        u = fundamental(m, (0.0,) * m).evaluate
        g = GeometrySpec.annulus((0.0,) * m, 1.0, 2.0)
        assert check(IdentityId.AnnulusRStar, u, g).residual <= 1e-12
        from mvquad.coefficients import r_star
        for f in (0.95, 1.05):
            assert check(IdentityId.AnnulusRStar, u, g, {"r": f * r_star(m, 1, 2)}).residual > 1e-4


def test_sweeps():
    f = lookup("harm:poly:m2:k2")
    sw = sweep_radius(IdentityId.AnnulusSphereAllR, f, (0.1, 0.1), np.linspace(0.3, 0.6, 20), {"r1": 0.3, "r2": 0.6})
    assert all(r.passed for r in sw.reports)
    fund = fundamental(2, (2.0, 0.0))
    sw = sweep_radius(IdentityId.WeightedHarmonic, fund, (0.0, 0.0), np.linspace(0.1, 1.0, 10))
    assert sw.lhs_rel_variance <= 1e-18 and sw.lhs_mean == pytest.approx(math.log(2.0), abs=1e-12)
    e = lookup("pan:exp:mu=1:d=e1")
    sw = sweep_radius(IdentityId.PanAnnulus, e, (0.0, 0.0), np.linspace(0.4, 0.9, 8), {"r1": 0.4, "r2": 0.9})
    assert all(r.passed for r in sw.reports)


def test_pan_ratio_composition():
    f = lookup("pan:exp:mu=2:d=e1")
    rep = check(IdentityId.PanRatio, f, GeometrySpec.ball((0.1, 0.2), 0.6))
    assert rep.residual <= 1e-8


def test_suite_negative_control_and_empty_plan():
    corpus = build_corpus(2)
    rep = run_suite(corpus, [PlanItem(IdentityId.GaussSphere, GeometryTemplate(count=5))],
                    families=["none:exp+sq:m2"])
    (group,) = rep.groups
    assert group.expected == "fail" and group.as_planned
    g = GeometrySpec.sphere((0, 0), 0.5)
    assert check(IdentityId.GaussSphere, corpus.get("none:exp+sq:m2"), g, enforce_kind=False).residual > 1e-3
    assert run_suite(corpus, []).groups == []


def test_suite_is_deterministic_and_serializable(monkeypatch):
    corpus = build_corpus(2)
    plan = default_plan([IdentityId.GaussBall, IdentityId.WeightedPan], count=4)
    a = run_suite(corpus, plan, seed=7)
    monkeypatch.setenv("MVQ_THREADS", "3")
    b = run_suite(corpus, plan, seed=7)
    assert _output.dumps(a.to_dict()) == _output.dumps(b.to_dict())
    c = run_suite(corpus, plan, seed=8)
    assert _output.dumps(a.to_dict()) != _output.dumps(c.to_dict())
    d = json.loads(_output.dumps(a.to_dict()))
    rec = d["reports"][0]
    assert set(rec) >= {"identity", "family_id", "geometry", "params", "lhs", "rhs", "residual", "tolerance",
                        "quad_error", "pass"}
    assert d["metadata"]["seed"] == 7 and "quadrature" in d["metadata"]


def test_geometries_admissible():
    corpus = build_corpus(3)
    tmpl = GeometryTemplate(count=25)
    for fam in corpus:
        for g, p in tmpl.generate(identity_spec(IdentityId.MetaAnnulus), fam, 0, {"lambda": 2.0}):
            assert fam.admits(g) and g.r2 * 2.0 < bessel_j_first_zero(0.5)
            assert g.r1 <= p["r"] <= g.r2


def test_default_plan_checks_annulus_inequality_at_outer_sphere():
    plan = {item.identity: item for item in default_plan()}
    assert plan[IdentityId.SubharmonicAnnulusIneq].template.sphere_at == "outer"
