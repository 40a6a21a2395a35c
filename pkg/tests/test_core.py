import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipsoid_measures.core import (
    Box,
    DimensionalConstants,
    Ellipsoid,
    ball,
    circumscribed_box,
    ellipsoid_from_matrix,
    ellipsoid_volume,
    make_ellipsoid,
    random_rotation,
    sphere_area,
    sym_elem,
    sym_elem_all,
    sym_elem_leave_one_out,
    unit_ball_volume,
)
from ellipsoid_measures.errors import DegeneracyError, DomainError

positive = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)
vectors = st.lists(positive, min_size=1, max_size=7)


@pytest.mark.parametrize("k", range(0, 25))
def test_unit_ball_volume_matches_gamma(k):
    ref = math.pi ** (k / 2) / math.gamma(k / 2 + 1)
    assert unit_ball_volume(k) == pytest.approx(ref, rel=1e-14)


@pytest.mark.parametrize("k", range(0, 20))
def test_sphere_area_relation(k):
    assert sphere_area(k) == pytest.approx((k + 1) * unit_ball_volume(k + 1), rel=1e-15)


def test_low_dimensional_constants():
    assert sphere_area(0) == 2.0
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    c = DimensionalConstants.for_dim(3)
    assert len(c.kappa) == 3 and len(c.omega) == 3
    assert c.kappa[2] == pytest.approx(4 * math.pi / 3)


@given(vectors)
def test_sym_elem_brute_force(values):
    s = sym_elem_all(values)
    assert s[0] == 1.0
    for k in range(1, len(values) + 1):
        ref = sum(math.prod(c) for c in itertools.combinations(values, k))
        assert s[k] == pytest.approx(ref, rel=1e-12)


@given(vectors, st.floats(min_value=0.1, max_value=10.0))
def test_sym_elem_homogeneity(values, lam):
    s = sym_elem_all(values)
    sl = sym_elem_all([lam * v for v in values])
    for k in range(len(values) + 1):
        assert sl[k] == pytest.approx(lam**k * s[k], rel=1e-12)


@given(st.lists(positive, min_size=2, max_size=6))
def test_leave_one_out(values):
    n = len(values)
    for k in range(n):
        loo = sym_elem_leave_one_out(values, k)
        for j in range(n):
            assert loo[j] == pytest.approx(sym_elem(values[:j] + values[j + 1 :], k), rel=1e-12)


def test_sym_elem_range():
    with pytest.raises(DomainError):
        sym_elem([1, 2], 3)


def test_ellipsoid_validation():
    with pytest.raises(DomainError, match="positive"):
        Ellipsoid(np.array([1.0, 0.0]))
    with pytest.raises(DomainError):
        Ellipsoid(np.array([1.0, 2.0]))  # must be sorted non-increasing
    with pytest.raises(DomainError):
        Ellipsoid(np.array([2.0, 1.0]), frame=np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_make_ellipsoid_sorts_and_keeps_geometry():
    rng = np.random.default_rng(4)
    frame = random_rotation(3, rng)
    e = make_ellipsoid([1.0, 3.0, 2.0], frame)
    assert e.semi_axes.tolist() == [3.0, 2.0, 1.0]
    q_ref = frame @ np.diag([1.0, 1 / 9, 1 / 4]) @ frame.T
    np.testing.assert_allclose(e.shape_matrix, q_ref, atol=1e-14)


def test_ellipsoid_arrays_are_read_only():
    e = make_ellipsoid([2.0, 1.0])
    with pytest.raises(ValueError):
        e.semi_axes[0] = 5.0


def test_volume_and_contains():
    e = make_ellipsoid([3.0, 2.0, 1.0], center=[1.0, -1.0, 0.5])
    assert ellipsoid_volume(e) == pytest.approx(4 / 3 * math.pi * 6)
    assert e.contains([[1.0, -1.0, 0.5]])[0]
    assert e.contains([[4.0, -1.0, 0.5]])[0]
    assert not e.contains([[4.01, -1.0, 0.5]])[0]


def test_from_matrix_and_degeneracy():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((3, 3))
    e = ellipsoid_from_matrix(a)
    np.testing.assert_allclose(e.semi_axes, np.sort(1 / np.linalg.svd(a, compute_uv=False))[::-1], rtol=1e-12)
    x = rng.standard_normal((50, 3))
    x /= np.linalg.norm(a @ x.T, axis=0)[:, None]  # |A x| = 1 on the boundary
    np.testing.assert_allclose(np.einsum("ij,jk,ik->i", x, e.shape_matrix, x), 1.0, rtol=1e-10)
    with pytest.raises(DegeneracyError):
        ellipsoid_from_matrix(np.diag([1.0, 1.0, 1e-14]))


def test_round_trip():
    rng = np.random.default_rng(0)
    e = make_ellipsoid([4.0, 2.0, 0.5], random_rotation(3, rng), [0.1, 0.2, 0.3])
    e2 = Ellipsoid.from_dict(e.to_dict())
    np.testing.assert_array_equal(e.semi_axes, e2.semi_axes)
    np.testing.assert_array_equal(e.frame, e2.frame)
    np.testing.assert_array_equal(e.center, e2.center)
    b = Box([1.0, 2.0], [0.0, 1.0])
    b2 = Box.from_dict(b.to_dict())
    np.testing.assert_array_equal(b.side_lengths, b2.side_lengths)


def test_rotation_is_haar_orthogonal():
    rng = np.random.default_rng(1)
    for n in (2, 3, 5):
        r = random_rotation(n, rng)
        np.testing.assert_allclose(r @ r.T, np.eye(n), atol=1e-12)


def test_circumscribed_box_contains_ellipsoid():
    e = make_ellipsoid([3.0, 1.0])
    b = circumscribed_box(e)
    np.testing.assert_allclose(np.sort(b.side_lengths), [2.0, 6.0])
    assert ball(2.0, 3).semi_axes.tolist() == [2.0, 2.0, 2.0]


@settings(max_examples=30)
@given(st.lists(positive, min_size=2, max_size=4), st.floats(min_value=0.2, max_value=5.0))
def test_scaling(axes, lam):
    e = make_ellipsoid(axes)
    assert e.scaled(lam).volume() == pytest.approx(lam ** len(axes) * e.volume(), rel=1e-12)
