import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipsoid_measures.core import ball, make_ellipsoid, random_rotation
from ellipsoid_measures.errors import DomainError, ResourceError
from ellipsoid_measures.lattice import (
    brute_force_count,
    dilation_sweep,
    lattice_count,
    lattice_discrepancy,
    slope_trend,
)


def sum_of_two_squares_count(r2: int) -> int:
    """Points of Z^2 with x^2 + y^2 <= r2, from r_2(k) = 4 (d_1(k) - d_3(k))."""
    total = 1
    for k in range(1, r2 + 1):
        d1 = sum(1 for d in range(1, k + 1, 2) if k % d == 0 and d % 4 == 1)
        d3 = sum(1 for d in range(1, k + 1, 2) if k % d == 0 and d % 4 == 3)
        total += 4 * (d1 - d3)
    return total


@pytest.mark.parametrize("r", [1, 2, 3, 5, 10, 17])
def test_disc_counts(r):
    assert lattice_count(ball(float(r), 2)) == sum_of_two_squares_count(r * r)


def test_small_known_values():
    assert lattice_count(ball(2.0, 2)) == 13
    assert lattice_count(ball(1.0, 3)) == 7
    assert lattice_count(ball(math.sqrt(2), 3)) == 19


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(min_value=0.3, max_value=4.0), min_size=2, max_size=4),
    st.integers(0, 2**31),
)
def test_matches_brute_force(axes, seed):
    rng = np.random.default_rng(seed)
    n = len(axes)
    e = make_ellipsoid(axes, random_rotation(n, rng), rng.uniform(-1, 1, n))
    assert lattice_count(e) == brute_force_count(e)


def test_monotone_under_inclusion():
    rng = np.random.default_rng(7)
    frame = random_rotation(3, rng)
    counts = [lattice_count(make_ellipsoid([lam * 2.0, lam * 1.0, lam * 0.7], frame)) for lam in (1, 1.3, 2, 3.1)]
    assert counts == sorted(counts)


def test_integer_translation_invariance():
    rng = np.random.default_rng(8)
    e = make_ellipsoid([2.5, 1.2], random_rotation(2, rng), [0.3, -0.2])
    assert lattice_count(e) == lattice_count(e.translated([3.0, -5.0]))


def test_workers_give_same_count():
    e = make_ellipsoid([20.0, 11.0, 7.0], random_rotation(3, np.random.default_rng(9)))
    assert lattice_count(e, workers=1) == lattice_count(e, workers=4)


def test_resource_guard():
    with pytest.raises(ResourceError) as err:
        lattice_count(ball(1e4, 3))
    assert err.value.estimate > 1e9
    assert err.value.exit_code == 4


def test_discrepancy_report_and_domain():
    rep = lattice_discrepancy(ball(2.0, 2))
    assert rep.count == 13
    assert rep.discrepancy == pytest.approx(abs(13 - 4 * math.pi))
    assert rep.ratio == pytest.approx(rep.discrepancy / rep.tube_value)
    with pytest.raises(DomainError):
        lattice_discrepancy(make_ellipsoid([2.0]))


def test_sweep_and_trend():
    rows = dilation_sweep(make_ellipsoid([1.3, 0.8]), range(1, 31))
    assert [r["lambda"] for r in rows] == list(map(float, range(1, 31)))
    t = slope_trend([r["lambda"] for r in rows], [r["ratio"] for r in rows])
    assert t.non_increasing
    up = slope_trend(np.arange(20.0), np.arange(20.0) + 0.01 * np.sin(np.arange(20.0)))
    assert not up.non_increasing
