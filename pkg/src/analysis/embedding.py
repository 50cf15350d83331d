"""Dimensionless delay space, hypercubic grid and information estimate."""

import math
from typing import Any, List, Optional, Sequence

import numpy as np

from src.models.embedding import DelayPointSeries, EmbeddingSpec
from src.models.telemetry import Telemetry
from src.utils.logger import get_logger

logger = get_logger(__name__)


def embed(telemetry: Telemetry, spec: EmbeddingSpec) -> DelayPointSeries:
    """Divide every axis channel by its measurement error.

    Point i has coordinate j equal to sample_j(i) / X_Δ(j), so distances are
    measured in multiples of the instrument resolution.

    Raises:
        UnknownChannelError: If an axis names a missing channel
    """
    columns = [telemetry.channel(name) for name in spec.axes]
    points = np.column_stack([c.samples / c.error for c in columns])
    series = DelayPointSeries.from_points(points, dt=telemetry.dt, axis_names=list(spec.axes))
    logger.debug("Telemetry embedded", axes=spec.axes, length=series.length)
    return series


def grid_index(point: Any, series: DelayPointSeries, h: float) -> np.ndarray:
    """Hypercubic cell of a normalized point: floor((x − min) / h) per axis.

    Cells are half-open, so every point belongs to exactly one cell. Points
    outside the series range get out-of-range indices.

    Raises:
        ValueError: If the dimension does not match the series or h is not positive
    """
    if h <= 0.0:
        raise ValueError(f"cell size must be positive, got {h}")
    x = np.asarray(point, dtype=float)
    if x.shape[-1] != series.dimension:
        raise ValueError(f"point dimension {x.shape[-1]} != series dimension {series.dimension}")
    return np.floor((x - series.axis_ranges[:, 0]) / h).astype(np.int64)


def cells_per_axis(series: DelayPointSeries, h: float) -> List[int]:
    """Grid size L per axis: floor(normalized range / h) + 1, so every index lies in [0, L)."""
    if h <= 0.0:
        raise ValueError(f"cell size must be positive, got {h}")
    spans = series.axis_ranges[:, 1] - series.axis_ranges[:, 0]
    return [int(math.floor(span / h)) + 1 for span in spans]


def occupied_cells(series: DelayPointSeries, h: float) -> int:
    """Number of distinct grid cells visited by the series."""
    if series.length == 0:
        return 0
    cells = grid_index(series.points, series, h)
    return int(np.unique(cells, axis=0).shape[0])


def information_estimate(telemetry: Telemetry, channels: Optional[Sequence[str]] = None) -> float:
    """Information bound I = Σ ln(X_max / X_Δ) over channels, in nats.

    Lagged copies repeat an instrument already counted, so callers pass the
    measured channels in ``channels``; every channel is summed when omitted.

    Raises:
        UnknownChannelError: If ``channels`` names a missing channel
        ValueError: If a channel's signal bound is below its resolution
    """
    names = telemetry.channel_names if channels is None else list(channels)
    total = 0.0
    for channel in (telemetry.channel(name) for name in names):
        if channel.max_abs < channel.error:
            raise ValueError(
                f"channel {channel.name}: X_max {channel.max_abs} is below "
                f"its resolution X_Δ {channel.error}"
            )
        total += math.log(channel.max_abs / channel.error)
    return total
