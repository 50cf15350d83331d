"""Modal analysis result models."""

from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.arrays import frozen_array
from src.models.markov import StateDistribution


class ModeFrequency(BaseModel):
    """Oscillation of one mode: f = 1/(n·Δt), n = 2π/|arg λ|, T = n·Δt."""

    frequency: float = Field(..., gt=0.0, description="Frequency f, Hz")
    steps_per_cycle: float = Field(..., gt=0.0, description="n_i, steps per cycle")
    period: float = Field(..., gt=0.0, description="Period T, seconds")

    model_config = ConfigDict(frozen=True)


class ModalResult(BaseModel):
    """Spectrum and eigenforms of a transition matrix, sorted by descending |λ|."""

    eigenvalues: np.ndarray = Field(..., description="Complex eigenvalues λ, shape (s,)")
    eigenforms: np.ndarray = Field(..., description="Right eigenvectors as columns, (s, s)")
    frequencies: List[Optional[float]] = Field(..., description="f per mode, Hz")
    periods: List[Optional[float]] = Field(..., description="T per mode, seconds")
    steps_per_cycle: List[Optional[float]] = Field(..., description="n_i per mode")
    damping: List[Optional[float]] = Field(..., description="ξ per mode")
    attractor_count: int = Field(..., ge=0, description="Eigenvalues within tol of one")
    stationary: StateDistribution = Field(..., description="Stationary distribution")
    dt: float = Field(..., gt=0.0, description="Step duration, seconds")
    residuals: np.ndarray = Field(..., description="‖Mφ − λφ‖∞ / ‖φ‖∞ per mode")
    condition_number: float = Field(..., description="Condition number of the eigenvector matrix")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("eigenvalues", "residuals", mode="before")
    @classmethod
    def freeze_vector(cls, v: Any) -> np.ndarray:
        """Store per-mode vectors read-only."""
        dtype = complex if np.iscomplexobj(v) else float
        return frozen_array(v, dtype=dtype, ndim=1, name="vector")

    @field_validator("eigenforms", mode="before")
    @classmethod
    def freeze_forms(cls, v: Any) -> np.ndarray:
        """Store eigenforms as a read-only complex matrix."""
        return frozen_array(v, dtype=complex, ndim=2, name="eigenforms")

    @model_validator(mode="after")
    def check_sizes(self) -> "ModalResult":
        """Every per-mode field has one entry per eigenvalue."""
        s = self.eigenvalues.shape[0]
        if self.eigenforms.shape != (s, s):
            raise ValueError(f"eigenforms shape {self.eigenforms.shape}, expected ({s}, {s})")
        for name in ("frequencies", "periods", "steps_per_cycle", "damping"):
            if len(getattr(self, name)) != s:
                raise ValueError(f"{name} must have {s} entries")
        if self.residuals.shape != (s,):
            raise ValueError(f"residuals must have {s} entries")
        return self

    @property
    def size(self) -> int:
        """Number of modes."""
        return int(self.eigenvalues.shape[0])
