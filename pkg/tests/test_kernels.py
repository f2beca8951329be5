import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from mvquad._kernels import _numba, _numpy

floats = st.floats(0.0, 15.0)


@settings(max_examples=40, deadline=None)
@given(hnp.arrays(np.float64, st.integers(1, 50), elements=floats), st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0]),
       st.sampled_from([1.0, 2.0]), st.booleans())
def test_series_backends_agree(t, c, d, negative):
    z = (-1 if negative else 1) * t * t / 4
    np.testing.assert_array_equal(_numba.series(z, c, d), _numpy.series(z, c, d))


@settings(max_examples=30, deadline=None)
@given(hnp.arrays(np.float64, st.integers(1, 30), elements=st.floats(15.0, 50.0)), st.sampled_from([0.0, 1.0, 2.0]))
def test_asymptotic_backends_agree(t, nu):
    np.testing.assert_allclose(_numba.asymptotic_i(nu, t), _numpy.asymptotic_i(nu, t), rtol=1e-15)


@settings(max_examples=30, deadline=None)
@given(hnp.arrays(np.float64, st.integers(1, 30), elements=st.floats(0.0, 50.0)), st.sampled_from([0, 1, 2]))
def test_bessel_integral_backends_agree(t, n):
    np.testing.assert_allclose(_numba.bessel_integral_j(n, t, 128), _numpy.bessel_integral_j(n, t, 128),
                               rtol=0, atol=1e-15)


@pytest.mark.parametrize("m", [2, 3])
def test_multilinear_backends_agree_and_reproduce_linear(m):
    rng = np.random.default_rng(1)
    shape = np.array([17] * m)
    lo, step = np.full(m, -1.0), np.full(m, 2.0 / 16)
    axes = [lo[i] + step[i] * np.arange(shape[i]) for i in range(m)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    coef = rng.normal(size=m)
    values = (mesh @ coef + 0.5).ravel()
    pts = rng.uniform(-1, 1, (500, m))
    a = _numba.multilinear(values, lo, step, shape, pts)
    b = _numpy.multilinear(values, lo, step, shape, pts)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-14)
    np.testing.assert_allclose(a, pts @ coef + 0.5, atol=1e-13)


def test_env_flag_selects_numpy_backend():
    code = "from mvquad import _kernels; print(_kernels.BACKEND)"
    env = {**os.environ, "MVQ_NO_NUMBA": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["MVQ_NO_NUMBA"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numba"
