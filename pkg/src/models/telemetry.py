"""Telemetry and synthetic signal specifications."""

from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.arrays import frozen_array
from src.utils.errors import UnknownChannelError


class Channel(BaseModel):
    """One measured quantity with its instrument resolution."""

    name: str = Field(..., min_length=1, description="Channel name")
    samples: np.ndarray = Field(..., description="Uniformly sampled values, signal units")
    error: float = Field(..., gt=0.0, description="Measurement error X_Δ, signal units")
    max_abs: float = Field(..., gt=0.0, description="Signal bound X_max, signal units")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("samples", mode="before")
    @classmethod
    def freeze_samples(cls, v: Any) -> np.ndarray:
        """Store samples as a read-only 1-D float array."""
        return frozen_array(v, ndim=1, name="samples")

    @model_validator(mode="after")
    def check_bound(self) -> "Channel":
        """X_max must bound every sample."""
        if self.samples.size and self.max_abs < float(np.max(np.abs(self.samples))):
            raise ValueError(
                f"channel {self.name}: max_abs {self.max_abs} is below the largest |sample|"
            )
        return self

    @classmethod
    def from_samples(cls, name: str, samples: Any, error: float) -> "Channel":
        """Build a channel whose X_max is the largest absolute sample.

        Raises:
            ValueError: If the channel is identically zero or the error is not positive
        """
        arr = np.asarray(samples, dtype=float)
        peak = float(np.max(np.abs(arr))) if arr.size else 0.0
        if peak == 0.0:
            raise ValueError(f"channel {name} is identically zero")
        return cls(name=name, samples=arr, error=error, max_abs=peak)


class Telemetry(BaseModel):
    """Uniformly sampled multichannel signal."""

    channels: List[Channel] = Field(..., min_length=1, description="Measured channels")
    dt: float = Field(..., gt=0.0, description="Sampling interval Δt, seconds")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_channels(self) -> "Telemetry":
        """Channels must be uniquely named and equally long (at least 2 samples)."""
        names = [c.name for c in self.channels]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate channel names: {', '.join(duplicates)}")
        lengths = {c.samples.shape[0] for c in self.channels}
        if len(lengths) != 1:
            raise ValueError(f"channels have different lengths: {sorted(lengths)}")
        if lengths.pop() < 2:
            raise ValueError("telemetry needs at least 2 samples per channel")
        return self

    @property
    def length(self) -> int:
        """Number of samples per channel."""
        return int(self.channels[0].samples.shape[0])

    @property
    def channel_names(self) -> List[str]:
        """Channel names in order."""
        return [c.name for c in self.channels]

    def channel(self, name: str) -> Channel:
        """Look up a channel by name.

        Raises:
            UnknownChannelError: If no channel has that name
        """
        for c in self.channels:
            if c.name == name:
                return c
        raise UnknownChannelError(name, self.channel_names)


class OscillatorSpec(BaseModel):
    """Damped linear oscillator X = A·e^{-ξωt}·sin(ωt + φ)."""

    amplitude: float = Field(..., description="Amplitude A, signal units")
    damping_ratio: float = Field(default=0.0, ge=0.0, lt=1.0, description="Damping ratio ξ")
    angular_frequency: float = Field(..., gt=0.0, description="Angular frequency ω, rad/s")
    phase: float = Field(default=0.0, description="Phase φ, rad")
    dt: float = Field(..., gt=0.0, description="Sampling interval, seconds")
    n_samples: int = Field(..., ge=2, description="Number of samples")
    noise_sd: float = Field(default=0.0, ge=0.0, description="Additive noise standard deviation")
    error: Optional[float] = Field(
        default=None, gt=0.0, description="Channel error X_Δ (defaults to |A|/100)"
    )

    @field_validator("amplitude")
    @classmethod
    def validate_amplitude(cls, v: float) -> float:
        """A zero amplitude has no measurable signal."""
        if v == 0.0:
            raise ValueError("amplitude must be non-zero")
        return v

    @property
    def channel_error(self) -> float:
        """Error assigned to both generated channels."""
        return self.error if self.error is not None else abs(self.amplitude) / 100.0


class QuasiPeriodicSpec(BaseModel):
    """Multichannel signal X_k = A_k·sin(ω_k t + φ_k) with incommensurate ω_k."""

    angular_frequencies: List[float] = Field(..., min_length=1, description="ω_k, rad/s")
    amplitudes: List[float] = Field(..., min_length=1, description="A_k, signal units")
    phases: Optional[List[float]] = Field(default=None, description="φ_k, rad (default 0)")
    errors: List[float] = Field(..., min_length=1, description="X_Δ per channel")
    dt: float = Field(..., gt=0.0, description="Sampling interval, seconds")
    n_samples: int = Field(..., ge=2, description="Number of samples")
    quantize: bool = Field(default=False, description="Round samples to the channel resolution")
    noise_sd: float = Field(default=0.0, ge=0.0, description="Additive noise standard deviation")

    @model_validator(mode="after")
    def check_lengths(self) -> "QuasiPeriodicSpec":
        """Per-channel lists must agree and hold valid values."""
        d = len(self.angular_frequencies)
        lists = {"amplitudes": self.amplitudes, "errors": self.errors}
        if self.phases is not None:
            lists["phases"] = self.phases
        for field, values in lists.items():
            if len(values) != d:
                raise ValueError(f"{field} has {len(values)} entries, expected {d}")
        if any(w <= 0.0 for w in self.angular_frequencies):
            raise ValueError("angular frequencies must be positive")
        if any(e <= 0.0 for e in self.errors):
            raise ValueError("channel errors must be positive")
        if any(a == 0.0 for a in self.amplitudes):
            raise ValueError("amplitudes must be non-zero")
        return self


class LagSpec(BaseModel):
    """A delayed copy of a channel."""

    source_channel: str = Field(..., min_length=1, description="Channel to delay")
    lag_steps: int = Field(..., gt=0, description="Delay in samples")

    model_config = ConfigDict(frozen=True)

    @property
    def channel_name(self) -> str:
        """Name of the derived channel."""
        return f"{self.source_channel}_lag{self.lag_steps}"
