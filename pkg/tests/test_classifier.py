import math

import numpy as np
import pytest

from mvquad.classifier import (
    GridField, HARMONIC, METAHARMONIC, PANHARMONIC, SUBHARMONIC, UNCLASSIFIED, Thresholds, classify, classify_grid,
    estimate_parameter, family_domain, invert_meta, invert_pan, labeled_corpus, probe_layout,
)
from mvquad.coefficients import a_circ_meta, a_circ_pan
from mvquad.errors import EstimationError, LatticeError, UsageError
from mvquad.quadrature import GeometrySpec
from mvquad.solutions import lookup


def ball(m, r=1.0):
    return GeometrySpec.ball((0.0,) * m, r)


@pytest.mark.parametrize("mu", [0.25, 1.0, 4.0])
@pytest.mark.parametrize("r", [0.3, 1.0])
@pytest.mark.parametrize("m", [2, 3])
def test_pan_inversion(m, mu, r):
    t = mu * r
    assert abs(invert_pan(m, a_circ_pan(m, t)) - t) <= 1e-9 * max(1, t)


@pytest.mark.parametrize("t", [0.1, 1.0, 2.0])
def test_meta_inversion(t):
    assert abs(invert_meta(2, a_circ_meta(2, t)) - t) <= 1e-9
    with pytest.raises(EstimationError):
        invert_meta(2, 1.5)
    with pytest.raises(EstimationError):
        invert_pan(2, 0.5)


def test_exp_y1_is_panharmonic():
    res = classify(lambda y: np.exp(y[..., 0]), ball(2))
    assert res.verdict == PANHARMONIC and abs(res.parameter_estimate - 1.0) <= 1e-6
    pan = [r for r in res.evidence if r.identity.value.startswith("Pan")]
    assert pan and all(r.passed for r in pan)


def test_cos_is_metaharmonic():
    res = classify(lambda y: np.cos(2 * y[..., 0]), ball(2))
    assert res.verdict == METAHARMONIC and abs(res.parameter_estimate - 2.0) <= 1e-6


def test_harmonic_and_subharmonic_and_unclassified():
    assert classify(lambda y: y[..., 0] ** 2 - y[..., 1] ** 2, ball(2)).verdict == HARMONIC
    res = classify(lambda y: np.sum(y**2, axis=-1), ball(3))
    assert res.verdict == SUBHARMONIC and res.parameter_estimate is None
    res = classify(lambda y: -np.sum(y**2, axis=-1), ball(2))
    assert res.verdict == UNCLASSIFIED


@pytest.mark.parametrize("m", [2, 3])
def test_labeled_corpus_callable(m):
    for fam in labeled_corpus(m):
        res = classify(fam, family_domain(fam))
        assert res.verdict == fam.expected_verdict, fam.id
        if fam.parameter is not None:
            assert abs(res.parameter_estimate - fam.parameter) <= 1e-6 * max(1, fam.parameter)


@pytest.mark.parametrize("c", [2.0, -0.5])
def test_scale_equivariance(c):
    for fid in ("pan:exp:mu=2:d=e1", "meta:sin:lam=1:d=e1", "harm:poly:m2:k3"):
        fam = lookup(fid)
        a = classify(fam, family_domain(fam))
        b = classify(lambda y: c * fam(y), family_domain(fam))
        assert a.verdict == b.verdict
        if a.parameter_estimate is not None:
            assert b.parameter_estimate == pytest.approx(a.parameter_estimate, rel=1e-9)


def test_vanishing_centres_raise():
    with pytest.raises(EstimationError):
        estimate_parameter(lambda y: np.zeros(y.shape[:-1]), *probe_layout(ball(2)))


def test_thresholds_recorded():
    th = Thresholds(equality=1e-5)
    d = classify(lambda y: np.exp(y[..., 0]), ball(2), thresholds=th).to_dict()
    assert d["thresholds"]["equality"] == 1e-5 and d["verdict"] == PANHARMONIC


def test_grid_mode_exp():
    gf = GridField.from_function(lambda y: np.exp(y[..., 0]), (-1, -1), (1, 1), (128, 128))
    res = classify_grid(gf)
    assert res.verdict == PANHARMONIC and abs(res.parameter_estimate - 1.0) <= 1e-3
    assert res.info["grid"]["counts"] == [128, 128]


def test_grid_minimum_resolution():
    gf = GridField.from_function(lambda y: y[..., 0], (-1, -1), (1, 1), (16, 16))
    with pytest.raises(UsageError):
        classify_grid(gf)
    with pytest.raises(UsageError):
        GridField.from_function(lambda y: y[..., 0], (-1, -1), (1, 1), (8, 8))


def test_csv_round_trip(tmp_path):
    gf = GridField.from_function(lambda y: np.sin(y[..., 0]) * y[..., 1], (-1, 0), (1, 2), (17, 20))
    back = GridField.from_csv(gf.write_csv(tmp_path / "g.csv"))
    assert back.counts == gf.counts and back.lo == gf.lo and back.hi == gf.hi
    np.testing.assert_array_equal(back.values, gf.values)
    y = np.array([[0.13, 0.77]])
    assert back(y)[0] == gf(y)[0]


def test_multilinear_exact_for_bilinear():
    gf = GridField.from_function(lambda y: 1 + 2 * y[..., 0] - y[..., 1] + 3 * y[..., 0] * y[..., 1],
                                 (-1, -1), (1, 1), (16, 16))
    rng = np.random.default_rng(0)
    y = rng.uniform(-1, 1, (50, 2))
    np.testing.assert_allclose(gf(y), 1 + 2 * y[:, 0] - y[:, 1] + 3 * y[:, 0] * y[:, 1], atol=1e-14)


def _write_lattice(path, pts, header="x1,x2,u"):
    path.write_text(header + "\n" + "".join(f"{a},{b},{a * b}\n" for a, b in pts))
    return path


def _lattice(n=16):
    ax = np.linspace(0, 1, n)
    return [(a, b) for a in ax for b in ax]


def test_csv_errors_name_the_line(tmp_path):
    pts = _lattice()
    pts[2] = (0.0, 0.5)
    with pytest.raises(LatticeError) as e:
        GridField.from_csv(_write_lattice(tmp_path / "a.csv", pts))
    assert e.value.line is not None and str(e.value).startswith(f"line {e.value.line}:")

    with pytest.raises(LatticeError) as e:
        GridField.from_csv(_write_lattice(tmp_path / "b.csv", _lattice(), header="a,b,u"))
    assert e.value.line == 1

    p = _write_lattice(tmp_path / "c.csv", _lattice()[:-1])
    with pytest.raises(LatticeError, match="rows"):
        GridField.from_csv(p)

    p = tmp_path / "d.csv"
    p.write_text("x1,x2,u\n0,0,1\n0,oops,2\n")
    with pytest.raises(LatticeError) as e:
        GridField.from_csv(p)
    assert e.value.line == 3

    pts = _lattice()
    pts[5], pts[6] = pts[6], pts[5]
    with pytest.raises(LatticeError) as e:
        GridField.from_csv(_write_lattice(tmp_path / "e.csv", pts))
    assert e.value.line == 7
