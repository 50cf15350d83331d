"""Unit tests for characteristic point selection, dimension and adequacy."""

import itertools

import numpy as np
import pytest
from scipy.spatial.distance import cdist, pdist

from src.analysis.states import (
    adequacy,
    build_point_set,
    estimate_dimension,
    neighbor_counts,
    select_points,
)
from src.models.embedding import DelayPointSeries
from src.models.states import CharacteristicPointSet


def _series(points) -> DelayPointSeries:
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    return DelayPointSeries.from_points(
        points, dt=0.1, axis_names=[f"a{i}" for i in range(points.shape[1])]
    )


def _lattice(side: int, dims: int) -> np.ndarray:
    return np.array(list(itertools.product(range(side), repeat=dims)), dtype=float)


def test_select_points_keeps_first_and_skips_close_candidates():
    """Test 1-D points [0, 0.5, 1.2, 1.3, 2.5] with R₀ = 1 keep {0, 1.2, 2.5}."""
    point_set = select_points(_series([0.0, 0.5, 1.2, 1.3, 2.5]), r0=1.0)

    np.testing.assert_array_equal(point_set.points[:, 0], [0.0, 1.2, 2.5])
    assert point_set.size == 3


def test_select_points_identical_samples():
    """Test a constant series collapses to one point with no neighbors."""
    point_set = select_points(_series(np.ones((20, 2))), r0=1.0)

    assert point_set.size == 1
    np.testing.assert_array_equal(point_set.neighbor_counts, [0])
    assert point_set.dimension_estimate == 1
    assert point_set.adequacy_fraction == 0.0


def test_select_points_separation_and_coverage():
    """Test kept points are pairwise ≥ R₀ apart and every sample lies near one."""
    rng = np.random.default_rng(11)
    points = rng.normal(scale=4.0, size=(2000, 3))
    r0 = 2.0

    point_set = select_points(_series(points), r0=r0)

    assert pdist(point_set.points, metric="sqeuclidean").min() >= r0
    nearest = cdist(points, point_set.points, metric="sqeuclidean").min(axis=1)
    assert np.all(nearest < r0 + 1e-12)


def test_select_points_is_idempotent():
    """Test selecting again from the selected points changes nothing."""
    rng = np.random.default_rng(5)
    first = select_points(_series(rng.uniform(-10, 10, size=(500, 2))), r0=1.0)

    second = select_points(_series(first.points), r0=1.0)

    np.testing.assert_array_equal(second.points, first.points)


def test_select_points_follows_time_order():
    """Test reversing the series changes which points win."""
    points = [0.0, 0.8, 1.6]

    forward = select_points(_series(points), r0=1.0)
    backward = select_points(_series(points[::-1]), r0=1.0)

    np.testing.assert_array_equal(forward.points[:, 0], [0.0, 1.6])
    np.testing.assert_array_equal(backward.points[:, 0], [1.6, 0.0])


def test_build_point_set_rejects_bad_input():
    """Test an empty series and a non-positive R₀ are rejected."""
    with pytest.raises(ValueError, match="non-empty"):
        build_point_set(np.empty((0, 2)), ["a", "b"])
    with pytest.raises(ValueError, match="r0"):
        build_point_set(np.zeros((3, 1)), ["a"], r0=0.0)


def test_neighbor_counts_examples():
    """Test counts for well-separated points and for a close pair."""
    spread = select_points(_series([0.0, 1.2, 2.5]), r0=1.0, k=1.4)
    np.testing.assert_array_equal(neighbor_counts(spread), [0, 0, 0])

    pair = build_point_set(np.array([[0.0, 0.0], [1.0, 0.2]]), ["a", "b"], r0=1.0, k=1.4)
    np.testing.assert_array_equal(neighbor_counts(pair), [1, 1])
    np.testing.assert_array_equal(pair.neighbor_counts, [1, 1])


@pytest.mark.parametrize("dims,side", [(1, 50), (2, 20), (3, 8), (4, 6)])
def test_estimate_dimension_on_lattices(dims, side):
    """Test a unit lattice in d dimensions is estimated as d-dimensional."""
    point_set = build_point_set(_lattice(side, dims), [f"a{i}" for i in range(dims)], r0=1.0)

    assert point_set.dimension_estimate == dims
    assert estimate_dimension(point_set) == dims


def test_estimate_dimension_without_neighbors():
    """Test zero neighbor counts still give dimension one."""
    point_set = select_points(_series([0.0, 5.0, 10.0, 15.0]), r0=1.0)

    assert estimate_dimension(point_set) == 1


def _clustered_point_set() -> CharacteristicPointSet:
    """Three 4-point simplices (3 neighbors each) plus four isolated points."""
    unit = np.eye(4)
    clusters = [unit + offset for offset in (0.0, 100.0, 200.0)]
    isolated = np.array([[300.0 + 50.0 * i, 0.0, 0.0, 0.0] for i in range(4)])
    points = np.vstack(clusters + [isolated])
    return build_point_set(points, ["a", "b", "c", "d"], r0=2.0, k=1.4)


def test_adequacy_fraction_at_threshold():
    """Test counts [3]*12 + [0]*4 give fraction 0.75, which is adequate."""
    point_set = _clustered_point_set()

    np.testing.assert_array_equal(point_set.neighbor_counts, [3] * 12 + [0] * 4)
    fraction, adequate = adequacy(point_set)

    assert fraction == pytest.approx(0.75)
    assert adequate is True
    assert point_set.adequacy_fraction == pytest.approx(0.75)


def test_adequacy_custom_threshold():
    """Test a stricter threshold flags the same set as under-trained."""
    fraction, adequate = adequacy(_clustered_point_set(), threshold=0.8)

    assert fraction == pytest.approx(0.75)
    assert adequate is False


def test_point_set_rejects_close_points():
    """Test the model refuses points closer than R₀."""
    with pytest.raises(ValueError, match="closer than r0"):
        CharacteristicPointSet(
            points=[[0.0], [0.5]],
            axis_names=["a"],
            r0=1.0,
            neighbor_counts=[1, 1],
            dimension_estimate=1,
            adequacy_fraction=0.0,
        )


def test_point_set_arrays_are_read_only():
    """Test stored arrays cannot be modified in place."""
    point_set = select_points(_series([0.0, 2.0]), r0=1.0)

    with pytest.raises(ValueError):
        point_set.points[0, 0] = 7.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_point_count_barely_depends_on_sample_order(seed):
    """Test shuffling uniform samples changes the number of kept points by at most half."""
    rng = np.random.default_rng(seed)
    points = rng.uniform(0.0, 10.0, size=(400, 2))

    ordered = build_point_set(points, ["a", "b"], r0=1.0)
    shuffled = build_point_set(points[rng.permutation(len(points))], ["a", "b"], r0=1.0)

    assert abs(ordered.size - shuffled.size) / ordered.size <= 0.5
