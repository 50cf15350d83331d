"""Delay-space embedding models."""

from typing import Any, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.arrays import frozen_array
from src.models.telemetry import LagSpec


def _check_unique(names: List[str]) -> List[str]:
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ValueError(f"duplicate axes: {', '.join(duplicates)}")
    return names


class EmbeddingSpec(BaseModel):
    """Ordered channel axes of the delay space and the grid cell edge."""

    axes: List[str] = Field(..., min_length=1, description="Channel names, one per axis")
    cell_size: float = Field(default=1.0, gt=0.0, description="Grid cell edge h, error units")

    model_config = ConfigDict(frozen=True)

    @field_validator("axes")
    @classmethod
    def validate_axes(cls, v: List[str]) -> List[str]:
        """Axes must not repeat."""
        return _check_unique(v)


class EmbeddingRecipe(BaseModel):
    """Everything needed to embed new telemetry the way a model was trained."""

    axes: List[str] = Field(..., min_length=1, description="Axis channel names")
    errors: List[float] = Field(..., min_length=1, description="X_Δ per axis")
    lags: List[LagSpec] = Field(default_factory=list, description="Lagged channels to derive")
    cell_size: float = Field(default=1.0, gt=0.0, description="Grid cell edge h")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_recipe(self) -> "EmbeddingRecipe":
        """One positive error per unique axis."""
        _check_unique(self.axes)
        if len(self.errors) != len(self.axes):
            raise ValueError(f"{len(self.errors)} errors given for {len(self.axes)} axes")
        if any(e <= 0.0 for e in self.errors):
            raise ValueError("axis errors must be positive")
        return self

    @property
    def spec(self) -> EmbeddingSpec:
        """Axis list and cell size as an EmbeddingSpec."""
        return EmbeddingSpec(axes=self.axes, cell_size=self.cell_size)


class DelayPointSeries(BaseModel):
    """Time-ordered points in the dimensionless delay space (multiples of X_Δ)."""

    points: np.ndarray = Field(..., description="Array of shape (length, d)")
    dt: float = Field(..., gt=0.0, description="Sampling interval Δt, seconds")
    axis_names: List[str] = Field(..., min_length=1, description="Axis names")
    axis_ranges: np.ndarray = Field(..., description="Per-axis (min, max), shape (d, 2)")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("points", mode="before")
    @classmethod
    def freeze_points(cls, v: Any) -> np.ndarray:
        """Store points as a read-only 2-D array."""
        return frozen_array(v, ndim=2, name="points")

    @field_validator("axis_ranges", mode="before")
    @classmethod
    def freeze_ranges(cls, v: Any) -> np.ndarray:
        """Store ranges as a read-only (d, 2) array."""
        return frozen_array(v, ndim=2, name="axis_ranges")

    @model_validator(mode="after")
    def check_shapes(self) -> "DelayPointSeries":
        """Points, names and ranges must agree on the dimension; ranges bound the points."""
        d = len(self.axis_names)
        if self.points.shape[1] != d:
            raise ValueError(f"points have dimension {self.points.shape[1]}, expected {d}")
        if self.axis_ranges.shape != (d, 2):
            raise ValueError(f"axis_ranges must have shape ({d}, 2)")
        if self.points.shape[0]:
            lo, hi = self.axis_ranges[:, 0], self.axis_ranges[:, 1]
            if np.any(self.points < lo) or np.any(self.points > hi):
                raise ValueError("axis_ranges do not bound every point")
        return self

    @classmethod
    def from_points(cls, points: Any, dt: float, axis_names: List[str]) -> "DelayPointSeries":
        """Build a series whose ranges are the data extrema."""
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.shape[0] == 0:
            ranges = np.zeros((arr.shape[1], 2))
        else:
            ranges = np.column_stack([arr.min(axis=0), arr.max(axis=0)])
        return cls(points=arr, dt=dt, axis_names=axis_names, axis_ranges=ranges)

    @property
    def dimension(self) -> int:
        """Number of axes d."""
        return len(self.axis_names)

    @property
    def length(self) -> int:
        """Number of points."""
        return int(self.points.shape[0])
