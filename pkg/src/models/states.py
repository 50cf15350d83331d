"""Characteristic point set model."""

from typing import Any, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.spatial.distance import pdist

from src.models.arrays import frozen_array


class CharacteristicPointSet(BaseModel):
    """Reference points of the delay space; each one is a discrete Markov state."""

    points: np.ndarray = Field(..., description="Array of shape (s, d), normalized units")
    axis_names: List[str] = Field(..., min_length=1, description="Axis names")
    r0: float = Field(default=1.0, gt=0.0, description="Squared-distance exclusion radius R₀")
    k: float = Field(default=1.4, gt=0.0, description="Neighbor factor")
    neighbor_counts: np.ndarray = Field(..., description="Neighbors within R₀·k, per point")
    dimension_estimate: int = Field(..., ge=1, description="Dimension estimate N")
    adequacy_fraction: float = Field(..., ge=0.0, le=1.0, description="Share with > 2 neighbors")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("points", mode="before")
    @classmethod
    def freeze_points(cls, v: Any) -> np.ndarray:
        """Store points as a read-only 2-D array."""
        return frozen_array(v, ndim=2, name="points")

    @field_validator("neighbor_counts", mode="before")
    @classmethod
    def freeze_counts(cls, v: Any) -> np.ndarray:
        """Store counts as a read-only integer vector."""
        return frozen_array(v, dtype=np.int64, ndim=1, name="neighbor_counts")

    @model_validator(mode="after")
    def check_points(self) -> "CharacteristicPointSet":
        """Shapes agree and no two points are closer than R₀ (squared)."""
        s, d = self.points.shape
        if s == 0:
            raise ValueError("a characteristic point set needs at least one point")
        if d != len(self.axis_names):
            raise ValueError(f"points have dimension {d}, expected {len(self.axis_names)}")
        if self.neighbor_counts.shape != (s,):
            raise ValueError(f"neighbor_counts must have length {s}")
        if s > 1:
            closest = float(pdist(self.points, metric="sqeuclidean").min())
            if closest < self.r0:
                raise ValueError(
                    f"points closer than r0: min squared distance {closest} < {self.r0}"
                )
        return self

    @property
    def size(self) -> int:
        """Number of characteristic points s."""
        return int(self.points.shape[0])

    @property
    def dimension(self) -> int:
        """Delay-space dimension d."""
        return int(self.points.shape[1])
