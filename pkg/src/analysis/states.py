"""Characteristic point selection, neighbor graph, dimension and adequacy."""

from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from src.models.embedding import DelayPointSeries
from src.models.states import CharacteristicPointSet
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_K = 1.4
DEFAULT_PERCENTILE = 95.0
DEFAULT_ADEQUACY_THRESHOLD = 0.75


def _select(points: np.ndarray, r0: float) -> np.ndarray:
    """Single forward pass: keep x iff no kept point lies within squared distance r0."""
    kept = np.empty_like(points)
    kept[0] = points[0]
    n = 1
    for x in points[1:]:
        diff = kept[:n] - x
        if np.einsum("ij,ij->i", diff, diff).min() >= r0:
            kept[n] = x
            n += 1
    return kept[:n].copy()


def _neighbor_counts(points: np.ndarray, threshold: float) -> np.ndarray:
    if points.shape[0] < 2:
        return np.zeros(points.shape[0], dtype=np.int64)
    close = squareform(pdist(points, metric="sqeuclidean") < threshold)
    return close.sum(axis=1).astype(np.int64)


def _dimension(counts: np.ndarray, percentile: float) -> int:
    if counts.shape[0] < 2:
        return 1
    robust_max = float(np.percentile(counts, percentile, method="nearest"))
    return max(1, round(robust_max / 2))


def _adequacy(counts: np.ndarray, threshold: float) -> Tuple[float, bool]:
    fraction = float(np.count_nonzero(counts > 2)) / counts.shape[0]
    return fraction, fraction >= threshold


def build_point_set(
    points: np.ndarray,
    axis_names: list,
    r0: float = 1.0,
    k: float = DEFAULT_K,
    percentile: float = DEFAULT_PERCENTILE,
) -> CharacteristicPointSet:
    """Select characteristic points from time-ordered points and analyse them.

    Args:
        points: Array (length, d) in normalized units, in time order
        axis_names: Axis names, one per column
        r0: Squared-distance exclusion radius R₀
        k: Neighbor factor; neighbors lie within squared distance r0·k
        percentile: Percentile of neighbor counts used as the robust maximum

    Returns:
        Fully populated point set

    Raises:
        ValueError: If there are no points or r0 is not positive
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("characteristic point selection needs a non-empty series")
    if r0 <= 0.0:
        raise ValueError(f"r0 must be positive, got {r0}")

    selected = _select(points, r0)
    counts = _neighbor_counts(selected, r0 * k)
    fraction, _ = _adequacy(counts, DEFAULT_ADEQUACY_THRESHOLD)
    point_set = CharacteristicPointSet(
        points=selected,
        axis_names=list(axis_names),
        r0=r0,
        k=k,
        neighbor_counts=counts,
        dimension_estimate=_dimension(counts, percentile),
        adequacy_fraction=fraction,
    )
    logger.debug(
        "Characteristic points selected",
        candidates=points.shape[0],
        selected=point_set.size,
        dimension=point_set.dimension_estimate,
    )
    return point_set


def select_points(
    series: DelayPointSeries,
    r0: float = 1.0,
    k: float = DEFAULT_K,
    percentile: float = DEFAULT_PERCENTILE,
) -> CharacteristicPointSet:
    """Select characteristic points from a delay-space series.

    A candidate is appended iff its squared distance to every current point is
    at least r0; the first point is always kept and the scan follows time order.
    """
    return build_point_set(series.points, series.axis_names, r0=r0, k=k, percentile=percentile)


def neighbor_counts(point_set: CharacteristicPointSet) -> np.ndarray:
    """Per point, the number of other points within squared distance r0·k."""
    return _neighbor_counts(point_set.points, point_set.r0 * point_set.k)


def estimate_dimension(
    point_set: CharacteristicPointSet, percentile: float = DEFAULT_PERCENTILE
) -> int:
    """N = round(n*/2), n* the robust maximum (percentile) of neighbor counts; at least 1."""
    return _dimension(neighbor_counts(point_set), percentile)


def adequacy(
    point_set: CharacteristicPointSet, threshold: Optional[float] = None
) -> Tuple[float, bool]:
    """Share of points with more than two neighbors, and whether it reaches ``threshold``.

    A low share means too few characteristic points for R₀: the model is under-trained.
    """
    if threshold is None:
        threshold = DEFAULT_ADEQUACY_THRESHOLD
    return _adequacy(neighbor_counts(point_set), threshold)
