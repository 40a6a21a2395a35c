import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipsoid_measures.bounds import (
    BoundInterval,
    parallel_area,
    parallel_volume,
    pinch_bounds,
    pinch_ratio,
    tube_area_bounds,
    tube_breakdown_radius,
    tube_constants,
    tube_polynomial,
    tube_volume_bounds,
)
from ellipsoid_measures.core import ball, make_ellipsoid, sphere_area
from ellipsoid_measures.errors import DomainError
from ellipsoid_measures.measures import ellipsoid_mean_curvatures_quadrature, sphere_mean_curvatures

axes_st = st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=2, max_size=5)


def test_interval_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        BoundInterval(2.0, 1.0, "x", {})
    iv = BoundInterval(1.0, 2.0, "x", {})
    assert 1.5 in iv and 2.5 not in iv


@settings(max_examples=40, deadline=None)
@given(axes_st)
def test_pinch_contains_quadrature(axes):
    e = make_ellipsoid(axes)
    m = ellipsoid_mean_curvatures_quadrature(e, 1e-10)
    for i in range(e.dim):
        b = pinch_bounds(e, i)
        slack = 1e-9 * m.values[i]
        assert b.lower - slack <= m.values[i] <= b.upper + slack
        assert b.ratio == pytest.approx(pinch_ratio(e.dim, i), rel=1e-12)


def test_pinch_upper_is_box_value():
    # the box with sides 2a has M_i = omega_i s_{n-1-i}(2a) / binom(n-1, i)
    e = make_ellipsoid([3.0, 2.0, 1.0])
    b = pinch_bounds(e, 0)
    assert b.upper == pytest.approx(2 * (6 * 4 + 6 * 2 + 4 * 2), rel=1e-14)


def test_tube_polynomial_values():
    f = tube_polynomial(make_ellipsoid([3.0, 2.0, 1.0]))
    assert float(f(2.0)) == 68.0
    assert float(tube_polynomial(make_ellipsoid([1.0, 1.0]))(1.0)) == 4.0
    # antiderivative by finite differences
    h = 1e-5
    assert (f.integral(1.0 + h) - f.integral(1.0 - h)) / (2 * h) == pytest.approx(float(f(1.0)), rel=1e-8)


@pytest.mark.parametrize("n", range(2, 9))
def test_tube_constants_ordered(n):
    c = tube_constants(n)
    assert 0 < c["c"] <= c["C"]


@settings(max_examples=30, deadline=None)
@given(axes_st, st.floats(min_value=0.01, max_value=1.0))
def test_tube_area_bounds_hold_below_valid_radius(axes, frac):
    e = make_ellipsoid(axes)
    m = ellipsoid_mean_curvatures_quadrature(e)
    rho = frac * float(np.sum(e.semi_axes))
    b = tube_area_bounds(e, rho)
    area = parallel_area(m, rho)
    assert b.lower * (1 - 1e-9) <= area <= b.upper * (1 + 1e-9)
    vb = tube_volume_bounds(e, rho)
    vol = parallel_volume(e.volume(), m, rho)
    assert vb.lower * (1 - 1e-9) <= vol <= vb.upper * (1 + 1e-9)


def test_parallel_area_is_derivative_of_volume():
    e = make_ellipsoid([2.0, 1.0, 0.5])
    m = ellipsoid_mean_curvatures_quadrature(e)
    h = 1e-5
    for rho in (0.1, 1.0, 3.0):
        dv = (parallel_volume(e.volume(), m, rho + h) - parallel_volume(e.volume(), m, rho - h)) / (2 * h)
        assert dv == pytest.approx(parallel_area(m, rho), rel=1e-8)


def test_parallel_ball_is_ball():
    m = sphere_mean_curvatures(1.5, 4)
    assert parallel_area(m, 0.5) == pytest.approx(sphere_area(3) * 2.0**3, rel=1e-14)


def test_breakdown_beyond_valid_radius():
    e = make_ellipsoid([3.0, 1.0, 0.2])
    m = ellipsoid_mean_curvatures_quadrature(e)
    assert tube_breakdown_radius(e, m) >= float(np.sum(e.semi_axes))


def test_tube_domain_errors():
    with pytest.raises(DomainError):
        tube_area_bounds(ball(1.0, 2), 0.0)
    with pytest.raises(DomainError):
        tube_area_bounds(ball(1.0, 2), -1.0)


def test_constants_recorded():
    b = pinch_bounds(make_ellipsoid([2.0, 1.0]), 0)
    assert set(b.constants_used) >= {"c", "C", "ratio_bound"}
    assert b.constants_used["ratio_bound"] == pytest.approx(math.sqrt(2), rel=1e-14)
