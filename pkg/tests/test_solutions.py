import math

import numpy as np
import pytest
from scipy.stats import qmc

from mvquad.errors import UnsupportedDimensionError, UsageError
from mvquad.solutions import (
    CORPUS_VERSION, CorpusManifest, FieldKind, build_corpus, finite_difference_laplacian, fundamental,
    kind_residual, lookup, pde_residual_oracle, perturb, radial_solution,
)


def interior_points(fam, n=50, seed=0):
    center, radius = fam.domain
    R = min(radius, 1.0) * 0.8
    z = qmc.Sobol(fam.dimension, scramble=True, seed=seed).random(64)[:n] * 2 - 1
    z *= R / math.sqrt(fam.dimension)
    return np.asarray(center) + z


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_corpus_contents(m):
    corpus = build_corpus(m)
    ids = corpus.ids()
    assert len(ids) == len(set(ids)) and corpus.version == CORPUS_VERSION
    for kind in FieldKind:
        assert corpus.of_kind(kind)
    for mu in ("0.5", "1", "2"):
        assert f"pan:exp:mu={mu}:d=e1" in ids
        assert f"meta:cos:lam={mu}:d=e1" in ids and f"meta:sin:lam={mu}:d=e1" in ids
    assert {f"sub:normsq:m{m}", f"sub:y1sq:m{m}", f"none:exp+sq:m{m}", f"none:y1^4:m{m}"} <= set(ids)
    fund = corpus.get(f"harm:fund:m{m}")
    pole = np.asarray(fund.info["pole"])
    assert np.linalg.norm(pole) >= 1.5 * fund.domain[1] - 1e-12


def test_m2_polynomials_and_unknown_dimension():
    ids = build_corpus(2).ids()
    for k in range(2, 6):
        assert f"harm:poly:m2:k{k}" in ids and f"harm:poly:m2:k{k}:im" in ids
    with pytest.raises(UnsupportedDimensionError):
        build_corpus(6)
    with pytest.raises(UsageError):
        build_corpus(2).get("nope")
    with pytest.raises(UsageError):
        CorpusManifest(2, (build_corpus(2).entries[0],) * 2)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_labels_confirmed_by_oracle(m):
    for fam in build_corpus(m):
        for x in interior_points(fam):
            assert pde_residual_oracle(fam, x, 1e-3) <= max(1e-8, 50 * 1e-6 * (1 + abs(fam(x[None])[0])))
            if fam.kind is FieldKind.NONE:
                continue
            assert kind_residual(fam, x, 1e-2, fam.kind, fam.parameter) <= 1e-7, (fam.id, x)


def test_oracle_examples():
    sq = lookup("sub:normsq:m2")
    assert pde_residual_oracle(sq, np.array([0.3, -0.2]), 1e-3) <= 1e-8
    e = lookup("pan:exp:mu=1:d=e1")
    assert e.dimension == 2 and e.parameter == 1.0
    assert pde_residual_oracle(e, np.zeros(2), 1e-3) <= 1e-6
    c = lookup("meta:cos:lam=2:d=e1")
    assert pde_residual_oracle(c, np.zeros(2), 1e-3) <= 1e-5
    f = fundamental(3, (3.0, 0.0, 0.0))
    assert abs(finite_difference_laplacian(f, np.array([0.2, 0.1, -0.3]), 1e-2, extrapolate=True)) <= 1e-8


def test_perturb():
    f, v = lookup("harm:coord:m2:i1"), lookup("sub:normsq:m2")
    assert perturb(f, v, 0.0) is f
    p = perturb(f, v, 1e-3)
    assert p.kind is FieldKind.NONE
    np.testing.assert_allclose(p.laplacian(np.zeros((3, 2))), 4e-3)
    quartic = lookup("none:y1^4:m2")
    p = perturb(f, quartic, 1.0)
    y = np.array([[0.5, 0.1]])
    assert p.laplacian(y)[0] == pytest.approx(12 * 0.25)
    with pytest.raises(UsageError):
        perturb(f, lookup("sub:normsq:m3"), 1.0)


@pytest.mark.parametrize("fid", ["harm:poly:m2:k3", "pan:exp:mu=1:d=e1", "meta:cos:lam=1:d=e1"])
def test_perturbation_rejected_by_oracle(fid):
    f = lookup(fid)
    p = perturb(f, lookup("sub:normsq:m2"), 1e-6)
    x = np.array([0.2, -0.1])
    assert kind_residual(p, x, 1e-2, f.kind, f.parameter) >= 1e-6


def test_radial_solutions():
    u = radial_solution(FieldKind.PANHARMONIC, 3, 1.0)
    y = np.array([[0.3, 0.4, 0.0], [1e-9, 0, 0], [0, 0, 0]])
    v = u(y)
    assert v[0] == pytest.approx(math.sinh(0.5) / 0.5, rel=1e-14)
    assert v[2] == 1.0 and abs(v[1] - 1.0) <= 1e-15
    w = radial_solution(FieldKind.METAHARMONIC, 2, 1.0)
    rng = np.random.default_rng(3)
    for x in rng.uniform(-1, 1, (100, 2)):
        assert kind_residual(w, x, 1e-2, FieldKind.METAHARMONIC, 1.0) <= 1e-6
    with pytest.raises(UsageError):
        radial_solution(FieldKind.HARMONIC, 2, 1.0)


def test_expected_verdicts_and_admissibility():
    from mvquad.quadrature import GeometrySpec

    assert lookup("none:exp+sq:m2").expected_verdict == "Subharmonic"
    assert lookup("none:quartic-mixed:m2").expected_verdict == "Unclassified"
    fund = lookup("harm:fund:m2")
    assert fund.admits(GeometrySpec.ball((0, 0), 0.9))
    assert not fund.admits(GeometrySpec.ball((0.5, 0), 0.6))
    d = fund.describe()
    assert d["domain"]["radius"] == pytest.approx(1.0) and d["kind"] == "Harmonic"
