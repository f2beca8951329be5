import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mvquad.errors import DomainError, RangeError, UnsupportedDimensionError, UnsupportedOrderError
from mvquad.specfun import (
    I_SERIES_MAX, J_SERIES_MAX, T_MAX, Order, bessel_i, bessel_j, bessel_j_derivative, bessel_j_first_zero,
    first_zero_for_dimension, gamma, unit_sphere_area,
)

ORDERS = [0, 0.5, 1, 1.5, 2, 2.5]


@pytest.mark.parametrize("x, want", [(1, 1.0), (0.5, math.sqrt(math.pi)), (3, 2.0), (2.5, 0.75 * math.sqrt(math.pi))])
def test_gamma_values(x, want):
    assert gamma(x) == pytest.approx(want, rel=1e-15)


def test_gamma_half_integers_match_mpmath():
    for k in range(1, 14):
        x = k / 2
        assert abs(gamma(x) / float(mpmath.gamma(x)) - 1) <= 1e-13


@pytest.mark.parametrize("x", [0, -1, -0.5])
def test_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_unit_sphere_area():
    assert unit_sphere_area(2) == pytest.approx(2 * math.pi)
    assert unit_sphere_area(3) == pytest.approx(4 * math.pi)
    assert unit_sphere_area(4) == pytest.approx(2 * math.pi**2)
    for m in (1, 6):
        with pytest.raises(UnsupportedDimensionError):
            unit_sphere_area(m)


def test_order_storage():
    assert Order.of(1.5).twice_nu == 3 and Order.of(1.5).half_integer
    assert Order.of(2).nu == 2.0 and not Order.of(2).half_integer
    with pytest.raises(UnsupportedOrderError):
        Order.of(0.3)
    with pytest.raises(UnsupportedOrderError):
        Order.of(3)


def test_bessel_spot_values():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-14)
    assert bessel_i(1, 2.0) == pytest.approx(1.5906368546373291, rel=1e-14)
    assert bessel_j(0, 0.0) == 1.0
    assert abs(bessel_j(0.5, math.pi)) <= 1e-15
    assert abs(bessel_j(0, 2.404825557695773)) <= 1e-12


@pytest.mark.parametrize("nu", ORDERS)
def test_bessel_i_against_mpmath(nu):
    ts = np.concatenate([np.linspace(0.0, 1.0, 11), np.linspace(1.0, T_MAX, 200),
                         [I_SERIES_MAX - 1e-9, I_SERIES_MAX, I_SERIES_MAX + 1e-9]])
    got = bessel_i(nu, ts)
    for t, g in zip(ts, got):
        want = float(mpmath.besseli(nu, t))
        if want == 0.0:
            assert g == 0.0
        else:
            assert abs(g / want - 1) <= 1e-12, (nu, t)


@pytest.mark.parametrize("nu", ORDERS)
def test_bessel_j_against_mpmath(nu):
    # J oscillates through zero, so the error is measured against max(1, |J|)-scaled absolute
    ts = np.concatenate([np.linspace(0.0, T_MAX, 400), [J_SERIES_MAX - 1e-9, J_SERIES_MAX + 1e-9]])
    got = bessel_j(nu, ts)
    for t, g in zip(ts, got):
        want = float(mpmath.besselj(nu, t))
        assert abs(g - want) <= 1e-12 * max(1.0, abs(want)) + 2e-15, (nu, t)


def test_range_errors():
    for fn in (bessel_i, bessel_j):
        with pytest.raises(RangeError):
            fn(0, -0.1)
        with pytest.raises(RangeError):
            fn(0, T_MAX + 1)


def test_scalar_and_array_shapes():
    assert isinstance(bessel_i(1, 2.0), float)
    assert bessel_j(0, np.ones((3, 2))).shape == (3, 2)


@pytest.mark.parametrize("nu", ORDERS)
def test_i_positive_increasing(nu):
    t = np.linspace(1e-3, T_MAX, 5000)
    v = bessel_i(nu, t)
    assert np.all(v > 0) and np.all(np.diff(v) > 0)


@pytest.mark.parametrize("nu", [1, 1.5])
def test_i_recurrence(nu):
    t = np.linspace(0.1, 40, 400)
    lhs = bessel_i(nu - 1, t) - bessel_i(nu + 1, t) - 2 * nu / t * bessel_i(nu, t)
    assert np.all(np.abs(lhs) <= 1e-10 * bessel_i(nu - 1, t))


def test_derivative_identity_by_finite_differences():
    t, h = np.linspace(0.5, 30, 60), 1e-5
    g = lambda s: s * bessel_i(1, s) - bessel_i(0, s) + 1
    fd = (g(t + h) - g(t - h)) / (2 * h)
    exact = t * (bessel_i(2, t) + bessel_i(0, t)) / 2
    assert np.max(np.abs(fd - exact) / exact) <= 1e-6


def test_j_derivative_matches_mpmath():
    for nu in (0, 0.5, 1, 1.5):
        for t in (0.3, 2.0, 7.5, 20.0):
            assert bessel_j_derivative(nu, t) == pytest.approx(float(mpmath.besselj(nu, t, derivative=1)), abs=1e-13)


@pytest.mark.parametrize("nu, want", [(0.5, math.pi), (0, 2.404825557695773), (1, 3.831705970207512),
                                      (1.5, 4.493409457909064)])
def test_first_zeros(nu, want):
    z = bessel_j_first_zero(nu)
    assert abs(z - want) <= 1e-10
    assert abs(bessel_j(nu, z)) <= 1e-10
    t = np.linspace(1e-6, z - 1e-6, 2000)
    assert np.all(bessel_j(nu, t) > 0)


def test_first_zero_unsupported_and_dimension_map():
    with pytest.raises(UnsupportedOrderError):
        bessel_j_first_zero(2)
    assert first_zero_for_dimension(3) == bessel_j_first_zero(0.5)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ORDERS), st.floats(0.0, T_MAX))
def test_i_exceeds_j_in_magnitude(nu, t):
    # |J_nu(t)| <= I_nu(t) termwise from the series
    assert abs(bessel_j(nu, t)) <= bessel_i(nu, t) * (1 + 1e-12) + 1e-300
