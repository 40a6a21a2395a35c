import math

import numpy as np
import pytest
from scipy import stats

from ellipsoid_measures.core import ball, make_ellipsoid, random_rotation
from ellipsoid_measures.errors import DomainError
from ellipsoid_measures.grassmann import (
    AffineFlat,
    flat_hits_ellipsoid,
    hit_counts,
    hit_estimate,
    hit_measure_ratio,
    inclusion_violations,
    sample_flat,
    sample_flats,
)
from ellipsoid_measures.measures import ellipsoid_mean_curvatures_quadrature


@pytest.mark.parametrize("n,r", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_sampled_flats_are_orthonormal_and_orthogonal_to_basepoint(n, r):
    base, dirs = sample_flats(n, r, 2.0, 500, np.random.default_rng(0))
    gram = np.einsum("mrn,msn->mrs", dirs, dirs)
    np.testing.assert_allclose(gram, np.broadcast_to(np.eye(r), gram.shape), atol=1e-12)
    np.testing.assert_allclose(np.einsum("mrn,mn->mr", dirs, base), 0.0, atol=1e-12)
    assert np.all(np.linalg.norm(base, axis=1) <= 2.0)


def test_line_directions_are_uniform():
    # octant of the first direction vector, chi-square on 8 cells
    _, dirs = sample_flats(3, 1, 1.0, 80_000, np.random.default_rng(1))
    v = dirs[:, 0, :]
    v = v * np.sign(v[:, :1])  # a line has no orientation
    cells = (v[:, 1] > 0).astype(int) * 2 + (v[:, 2] > 0)
    counts = np.bincount(cells, minlength=4)
    assert stats.chisquare(counts).pvalue > 1e-3


@pytest.mark.parametrize("n,r", [(2, 1), (3, 1), (3, 2)])
def test_ball_hit_fraction(n, r):
    # flats through a ball of radius R_ref hit a concentric ball of radius R
    # with probability (R / R_ref)^(n - r)
    est = hit_estimate(ball(1.0, n), r, 200_000, seed=2, reference_radius=2.0)
    p = 0.5 ** (n - r)
    assert abs(est.estimate - p) < 4 * math.sqrt(p * (1 - p) / est.trials)


def test_hits_boundary_and_misses():
    e = make_ellipsoid([2.0, 1.0])
    touching = AffineFlat(np.array([0.0, 1.0]), np.array([[1.0, 0.0]]))
    missing = AffineFlat(np.array([0.0, 1.01]), np.array([[1.0, 0.0]]))
    assert flat_hits_ellipsoid(touching, e)
    assert not flat_hits_ellipsoid(missing, e)
    with pytest.raises(DomainError):
        flat_hits_ellipsoid(touching, ball(1.0, 3))


def test_rotation_invariance_of_hits():
    rng = np.random.default_rng(3)
    e = make_ellipsoid([2.0, 1.0, 0.5], random_rotation(3, rng))
    rot = random_rotation(3, rng)
    er = e.rotated(rot)
    for _ in range(200):
        f = sample_flat(3, 1, 3.0, rng)
        assert flat_hits_ellipsoid(f, e) == flat_hits_ellipsoid(f.rotated(rot), er)


def test_ratio_matches_quadrature():
    e1 = make_ellipsoid([2.0, 1.0, 1.0])
    e2 = ball(1.0, 3)
    for r in (1, 2):
        ratio, se, _ = hit_measure_ratio(e1, e2, r, 200_000, seed=4)
        q1 = ellipsoid_mean_curvatures_quadrature(e1).values[r - 1]
        q2 = ellipsoid_mean_curvatures_quadrature(e2).values[r - 1]
        assert abs(ratio - q1 / q2) < 3.5 * se


def test_worker_count_does_not_change_counts():
    bodies = [make_ellipsoid([1.5, 1.0]), ball(1.0, 2)]
    a = hit_counts(bodies, 1, 150_000, seed=5, workers=1)
    b = hit_counts(bodies, 1, 150_000, seed=5, workers=4)
    np.testing.assert_array_equal(a[1], b[1])


def test_nested_ellipsoids_never_violate_inclusion():
    inner = make_ellipsoid([1.0, 0.5, 0.5])
    outer = make_ellipsoid([1.2, 0.6, 0.7])
    assert inclusion_violations(inner, outer, 1, 50_000, seed=6) == 0


def test_ratio_input_checks():
    with pytest.raises(DomainError):
        hit_measure_ratio(ball(1, 2), ball(1, 2), 1, 100, 0)
    with pytest.raises(DomainError):
        hit_measure_ratio(ball(1, 2), ball(1, 2), 2, 20_000, 0)
