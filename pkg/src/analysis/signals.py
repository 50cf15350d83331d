"""Telemetry ingestion, lagged channels and synthetic test signals."""

import re
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.models.telemetry import (
    Channel,
    LagSpec,
    OscillatorSpec,
    QuasiPeriodicSpec,
    Telemetry,
)
from src.utils.errors import TelemetryFormatError, UnknownChannelError
from src.utils.logger import get_logger

logger = get_logger(__name__)

NOISE_CLIP_SD = 5.0


def load_csv(
    path: Union[str, Path],
    dt: float,
    errors: Mapping[str, float],
    default_error: Optional[float] = None,
) -> Telemetry:
    """Read a headered, comma-separated telemetry file.

    Args:
        path: CSV file with a header row of channel names and one numeric row per sample
        dt: Sampling interval, seconds
        errors: Measurement error X_Δ per channel name
        default_error: Error for channels missing from ``errors``

    Returns:
        Telemetry with X_max set to the largest |sample| of each channel

    Raises:
        FileNotFoundError: If the file does not exist
        TelemetryFormatError: On ragged rows or non-numeric cells (with row/column)
        UnknownChannelError: If ``errors`` names a channel absent from the header
        ValueError: If a channel has no error or the result violates Telemetry invariants
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"telemetry file not found: {path}")

    try:
        # header=None keeps repeated names as written; pandas would rename them x.1
        header = pd.read_csv(
            path, header=None, nrows=1, dtype=str, keep_default_na=False, encoding="utf-8"
        ).iloc[0]
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as err:
        raise TelemetryFormatError("file is empty", row=1) from err
    except pd.errors.ParserError as err:
        match = re.search(r"line (\d+)", str(err))
        raise TelemetryFormatError(
            "ragged row, field count differs from the header",
            row=int(match.group(1)) if match else 0,
        ) from err

    seen: Dict[str, int] = {}
    for col, raw in enumerate(header, start=1):
        name = str(raw).strip()
        if name in seen:
            raise TelemetryFormatError(
                f"duplicate channel name {name!r} (also column {seen[name]})", row=1, column=col
            )
        seen[name] = col

    if not isinstance(frame.index, pd.RangeIndex):
        # pandas turns an extra leading field into an index
        raise TelemetryFormatError("ragged row, field count differs from the header", row=2)
    if frame.empty:
        raise TelemetryFormatError("no data rows after the header", row=2)

    names = [str(c).strip() for c in frame.columns]
    frame.columns = names

    missing = frame.isna().to_numpy()
    if missing.any():
        row, _ = np.argwhere(missing)[0]
        raise TelemetryFormatError(
            "ragged row, field count differs from the header", row=int(row) + 2
        )

    stripped = frame.apply(lambda col: col.str.strip())
    coerced = stripped.apply(lambda col: pd.to_numeric(col, errors="coerce"))
    bad = ~np.isfinite(coerced.to_numpy(dtype=float))
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise TelemetryFormatError(
            f"non-numeric cell {frame.iat[row, col]!r}", row=int(row) + 2, column=int(col) + 1
        )
    # float() is correctly rounded, so values written with %.17g read back exactly
    matrix = stripped.to_numpy(dtype=object).astype(float)

    for name in errors:
        if name not in names:
            raise UnknownChannelError(name, names)

    channels = []
    for j, name in enumerate(names):
        error = errors.get(name, default_error)
        if error is None:
            raise ValueError(f"no measurement error given for channel {name}")
        channels.append(Channel.from_samples(name, matrix[:, j], error))

    telemetry = Telemetry(channels=channels, dt=dt)
    logger.debug("Telemetry loaded", path=str(path), channels=names, length=telemetry.length)
    return telemetry


def save_csv(telemetry: Telemetry, path: Union[str, Path]) -> Path:
    """Write telemetry in the format ``load_csv`` reads, at full float precision.

    Args:
        telemetry: Telemetry to write
        path: Destination file

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({c.name: c.samples for c in telemetry.channels})
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


def _bounded_noise(
    rng: np.random.Generator, sd: float, shape: Union[int, Sequence[int]]
) -> np.ndarray:
    """Gaussian noise clipped at ±5 sd, so envelope bounds hold for every sample."""
    if sd == 0.0:
        return np.zeros(shape)
    return np.clip(rng.normal(0.0, sd, shape), -NOISE_CLIP_SD * sd, NOISE_CLIP_SD * sd)


def synth_oscillator(spec: OscillatorSpec, seed: Optional[int] = None) -> Telemetry:
    """Sample a damped linear oscillator and its analytic velocity.

    x(t) = A·e^{-ξωt}·sin(ωt + φ), v(t) = A·e^{-ξωt}·(ω·cos(ωt + φ) − ξω·sin(ωt + φ)),
    with t_i = i·dt.

    Args:
        spec: Oscillator parameters
        seed: Seed for the additive noise

    Returns:
        Telemetry with channels "x" and "v"
    """
    t = np.arange(spec.n_samples) * spec.dt
    w = spec.angular_frequency
    envelope = spec.amplitude * np.exp(-spec.damping_ratio * w * t)
    arg = w * t + spec.phase
    x = envelope * np.sin(arg)
    v = envelope * (w * np.cos(arg) - spec.damping_ratio * w * np.sin(arg))

    rng = np.random.default_rng(seed)
    x = x + _bounded_noise(rng, spec.noise_sd, spec.n_samples)
    v = v + _bounded_noise(rng, spec.noise_sd, spec.n_samples)

    error = spec.channel_error
    logger.debug("Oscillator synthesized", n_samples=spec.n_samples, error=error)
    return Telemetry(
        channels=[Channel.from_samples("x", x, error), Channel.from_samples("v", v, error)],
        dt=spec.dt,
    )


def synth_quasiperiodic(spec: QuasiPeriodicSpec, seed: Optional[int] = None) -> Telemetry:
    """Sample independent sinusoids on channels q1..qd.

    With ``spec.quantize`` every sample is rounded to a multiple of its channel
    error, as an instrument with that resolution would report it.

    Args:
        spec: Channel frequencies, amplitudes, phases and errors
        seed: Seed for the additive noise

    Returns:
        Telemetry with one channel per frequency
    """
    t = np.arange(spec.n_samples) * spec.dt
    phases = spec.phases or [0.0] * len(spec.angular_frequencies)
    rng = np.random.default_rng(seed)

    channels = []
    for k, (w, a, phi, err) in enumerate(
        zip(spec.angular_frequencies, spec.amplitudes, phases, spec.errors), start=1
    ):
        x = a * np.sin(w * t + phi) + _bounded_noise(rng, spec.noise_sd, spec.n_samples)
        if spec.quantize:
            x = np.round(x / err) * err
        channels.append(Channel.from_samples(f"q{k}", x, err))
    return Telemetry(channels=channels, dt=spec.dt)


def add_lag_channels(telemetry: Telemetry, lags: List[LagSpec]) -> Telemetry:
    """Append delayed copies of channels, aligned at the latest common instant.

    With L the largest lag, output sample j of every original channel is input
    sample j + L, and of a channel lagged by k it is input sample j + L − k.

    Args:
        telemetry: Source telemetry
        lags: Lagged channels to derive

    Returns:
        Telemetry of length ``length − L`` with channels "<source>_lag<k>" appended

    Raises:
        UnknownChannelError: If a lag names a missing channel
        ValueError: If a lag is not shorter than the telemetry
    """
    if not lags:
        return telemetry

    for lag in lags:
        telemetry.channel(lag.source_channel)
        if lag.lag_steps >= telemetry.length:
            raise ValueError(
                f"lag {lag.lag_steps} on {lag.source_channel} is not shorter than "
                f"the telemetry length {telemetry.length}"
            )

    longest = max(lag.lag_steps for lag in lags)
    end = telemetry.length
    channels = [
        Channel(name=c.name, samples=c.samples[longest:], error=c.error, max_abs=c.max_abs)
        for c in telemetry.channels
    ]
    for lag in lags:
        source = telemetry.channel(lag.source_channel)
        channels.append(
            Channel(
                name=lag.channel_name,
                samples=source.samples[longest - lag.lag_steps : end - lag.lag_steps],
                error=source.error,
                max_abs=source.max_abs,
            )
        )
    return Telemetry(channels=channels, dt=telemetry.dt)
