"""Unit tests for telemetry ingestion, lagged channels and signal generators."""

import math

import numpy as np
import pytest

from src.analysis.signals import (
    add_lag_channels,
    load_csv,
    save_csv,
    synth_oscillator,
    synth_quasiperiodic,
)
from src.models.telemetry import Channel, LagSpec, OscillatorSpec, QuasiPeriodicSpec, Telemetry
from src.utils.errors import TelemetryFormatError, UnknownChannelError


def _write(tmp_path, text: str):
    path = tmp_path / "telemetry.csv"
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_parses_header_and_rows(tmp_path):
    """Test a small file parses into equal-length channels."""
    path = _write(tmp_path, "knee,hip\n1.0,2.0\n-3.5,4e-1\n5,6\n")

    telemetry = load_csv(path, dt=0.01, errors={"knee": 0.5, "hip": 0.5})

    assert telemetry.channel_names == ["knee", "hip"]
    assert telemetry.length == 3
    np.testing.assert_array_equal(telemetry.channel("knee").samples, [1.0, -3.5, 5.0])
    assert telemetry.channel("knee").max_abs == 5.0
    assert telemetry.channel("hip").error == 0.5


def test_load_csv_reports_non_numeric_cell(tmp_path):
    """Test a non-numeric cell is reported with its row and column."""
    path = _write(tmp_path, "knee,hip\n1.0,abc\n2.0,3.0\n")

    with pytest.raises(TelemetryFormatError) as exc_info:
        load_csv(path, dt=0.01, errors={"knee": 0.5, "hip": 0.5})

    assert exc_info.value.row == 2
    assert exc_info.value.column == 2
    assert "row 2, column 2" in str(exc_info.value)


def test_load_csv_rejects_duplicate_channel_names(tmp_path):
    """Test a repeated header name is reported at row 1 instead of being renamed."""
    path = _write(tmp_path, "x,v,x\n1.0,2.0,3.0\n4.0,5.0,6.0\n")

    with pytest.raises(TelemetryFormatError, match="duplicate channel name 'x'") as exc_info:
        load_csv(path, dt=0.01, errors={}, default_error=0.5)

    assert exc_info.value.row == 1
    assert exc_info.value.column == 3


def test_load_csv_rejects_unknown_error_channel(tmp_path):
    """Test the errors map may only name header channels."""
    path = _write(tmp_path, "knee,hip\n1.0,2.0\n3.0,4.0\n")

    with pytest.raises(UnknownChannelError, match="unknown channel ankle"):
        load_csv(path, dt=0.01, errors={"ankle": 0.1}, default_error=0.5)


def test_load_csv_reports_ragged_rows(tmp_path):
    """Test short and long rows are rejected with their row number."""
    short = _write(tmp_path, "a,b\n1,2\n3\n4,5\n")
    with pytest.raises(TelemetryFormatError) as exc_info:
        load_csv(short, dt=1.0, errors={}, default_error=1.0)
    assert exc_info.value.row == 3

    long_path = tmp_path / "long.csv"
    long_path.write_text("a,b\n1,2\n3,4,5\n", encoding="utf-8")
    with pytest.raises(TelemetryFormatError) as exc_info:
        load_csv(long_path, dt=1.0, errors={}, default_error=1.0)
    assert exc_info.value.row == 3


def test_load_csv_missing_and_empty_files(tmp_path):
    """Test missing, empty and header-only files."""
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "absent.csv", dt=1.0, errors={}, default_error=1.0)

    with pytest.raises(TelemetryFormatError):
        load_csv(_write(tmp_path, ""), dt=1.0, errors={}, default_error=1.0)

    header_only = tmp_path / "header.csv"
    header_only.write_text("a,b\n", encoding="utf-8")
    with pytest.raises(TelemetryFormatError, match="no data rows"):
        load_csv(header_only, dt=1.0, errors={}, default_error=1.0)


def test_load_csv_requires_an_error_per_channel(tmp_path):
    """Test a channel without an error and without a default is rejected."""
    path = _write(tmp_path, "a,b\n1,2\n3,4\n")

    with pytest.raises(ValueError, match="no measurement error"):
        load_csv(path, dt=1.0, errors={"a": 1.0})


def test_save_then_load_is_exact(tmp_path):
    """Test the CSV writer keeps every sample bit for bit."""
    rng = np.random.default_rng(7)
    telemetry = Telemetry(
        channels=[
            Channel.from_samples("a", rng.normal(size=50) * 1e3, 0.1),
            Channel.from_samples("b", rng.normal(size=50) / 3.0, 0.2),
        ],
        dt=0.02,
    )

    path = save_csv(telemetry, tmp_path / "out" / "roundtrip.csv")
    loaded = load_csv(path, dt=0.02, errors={"a": 0.1, "b": 0.2})

    for name in ("a", "b"):
        np.testing.assert_array_equal(loaded.channel(name).samples, telemetry.channel(name).samples)


def test_synth_oscillator_pure_sine_at_quarter_periods():
    """Test an undamped unit sine sampled at quarter periods."""
    spec = OscillatorSpec(amplitude=1.0, angular_frequency=2 * math.pi, dt=0.25, n_samples=5)

    telemetry = synth_oscillator(spec)

    np.testing.assert_allclose(telemetry.channel("x").samples, [0, 1, 0, -1, 0], atol=1e-12)
    assert telemetry.channel_names == ["x", "v"]
    assert telemetry.channel("x").error == pytest.approx(0.01)


def test_synth_oscillator_initial_state_with_phase():
    """Test x(0) = A and v(0) = 0 for φ = π/2."""
    spec = OscillatorSpec(
        amplitude=2.0, angular_frequency=1.0, phase=math.pi / 2, dt=0.1, n_samples=10
    )

    telemetry = synth_oscillator(spec)

    assert telemetry.channel("x").samples[0] == pytest.approx(2.0, abs=1e-12)
    assert telemetry.channel("v").samples[0] == pytest.approx(0.0, abs=1e-12)


def test_synth_oscillator_respects_envelope():
    """Test |x(t)| never exceeds the decaying envelope, noise included."""
    spec = OscillatorSpec(
        amplitude=1.0,
        damping_ratio=0.1,
        angular_frequency=2 * math.pi,
        dt=0.013,
        n_samples=2000,
        noise_sd=0.05,
    )

    telemetry = synth_oscillator(spec, seed=3)

    t = np.arange(spec.n_samples) * spec.dt
    bound = np.exp(-0.2 * math.pi * t) + 5 * spec.noise_sd
    assert np.all(np.abs(telemetry.channel("x").samples) <= bound + 1e-12)


def test_synth_oscillator_undamped_is_periodic():
    """Test x(t + 2π/ω) = x(t) for an undamped oscillator."""
    spec = OscillatorSpec(amplitude=1.5, angular_frequency=2 * math.pi, dt=0.01, n_samples=400)

    x = synth_oscillator(spec).channel("x").samples

    np.testing.assert_allclose(x[100:], x[:-100], atol=1e-9)


def test_synth_oscillator_velocity_is_derivative():
    """Test the velocity channel matches a central difference of x."""
    spec = OscillatorSpec(
        amplitude=1.0, damping_ratio=0.05, angular_frequency=3.0, dt=1e-4, n_samples=1000
    )

    telemetry = synth_oscillator(spec)

    x = telemetry.channel("x").samples
    v = telemetry.channel("v").samples
    np.testing.assert_allclose((x[2:] - x[:-2]) / (2 * spec.dt), v[1:-1], atol=1e-6)


def test_synth_oscillator_is_seeded():
    """Test identical seeds give identical noisy samples."""
    spec = OscillatorSpec(
        amplitude=1.0, angular_frequency=1.0, dt=0.1, n_samples=100, noise_sd=0.1
    )

    first = synth_oscillator(spec, seed=42).channel("x").samples
    second = synth_oscillator(spec, seed=42).channel("x").samples
    other = synth_oscillator(spec, seed=43).channel("x").samples

    np.testing.assert_array_equal(first, second)
    assert not np.array_equal(first, other)


@pytest.mark.parametrize(
    "overrides",
    [{"n_samples": 1}, {"damping_ratio": 1.5}, {"angular_frequency": 0.0}, {"amplitude": 0.0}],
)
def test_oscillator_spec_validation(overrides):
    """Test invalid oscillator parameters are rejected."""
    params = {"amplitude": 1.0, "angular_frequency": 1.0, "dt": 0.1, "n_samples": 10}
    params.update(overrides)

    with pytest.raises(ValueError):
        OscillatorSpec(**params)


def test_synth_quasiperiodic_quantizes_to_resolution():
    """Test quantized channels are exact multiples of their error."""
    spec = QuasiPeriodicSpec(
        angular_frequencies=[1.0, math.sqrt(2)],
        amplitudes=[3.0, 2.0],
        errors=[0.5, 1.0],
        dt=0.3,
        n_samples=500,
        quantize=True,
    )

    telemetry = synth_quasiperiodic(spec)

    assert telemetry.channel_names == ["q1", "q2"]
    for channel in telemetry.channels:
        ratio = channel.samples / channel.error
        np.testing.assert_array_equal(ratio, np.round(ratio))


def test_quasiperiodic_spec_rejects_mismatched_lists():
    """Test per-channel lists must have equal lengths."""
    with pytest.raises(ValueError):
        QuasiPeriodicSpec(
            angular_frequencies=[1.0, 2.0],
            amplitudes=[1.0],
            errors=[0.1, 0.1],
            dt=0.1,
            n_samples=10,
        )


def _hip_telemetry(samples) -> Telemetry:
    return Telemetry(channels=[Channel.from_samples("hip", samples, 0.5)], dt=0.01)


def test_add_lag_channels_aligns_at_latest_sample():
    """Test (hip, hip_lag1) pairs for hip = [1, 2, 3, 4]."""
    telemetry = add_lag_channels(
        _hip_telemetry([1.0, 2.0, 3.0, 4.0]), [LagSpec(source_channel="hip", lag_steps=1)]
    )

    pairs = list(zip(telemetry.channel("hip").samples, telemetry.channel("hip_lag1").samples))
    assert pairs == [(2.0, 1.0), (3.0, 2.0), (4.0, 3.0)]
    assert telemetry.channel("hip_lag1").error == 0.5


def test_add_lag_channels_truncates_to_longest_lag():
    """Test two lags {1, 2} on a length-5 channel leave 3 samples."""
    source = _hip_telemetry([1.0, 2.0, 3.0, 4.0, 5.0])

    telemetry = add_lag_channels(
        source,
        [LagSpec(source_channel="hip", lag_steps=1), LagSpec(source_channel="hip", lag_steps=2)],
    )

    assert telemetry.length == 3
    assert telemetry.channel_names == ["hip", "hip_lag1", "hip_lag2"]
    np.testing.assert_array_equal(telemetry.channel("hip_lag2").samples, [1.0, 2.0, 3.0])
    assert set(telemetry.channel("hip_lag1").samples) <= set(source.channel("hip").samples)


def test_add_lag_channels_errors():
    """Test non-positive lags, over-long lags and unknown sources."""
    telemetry = _hip_telemetry([1.0, 2.0, 3.0])

    with pytest.raises(ValueError):
        LagSpec(source_channel="hip", lag_steps=0)
    with pytest.raises(ValueError, match="not shorter"):
        add_lag_channels(telemetry, [LagSpec(source_channel="hip", lag_steps=3)])
    with pytest.raises(UnknownChannelError):
        add_lag_channels(telemetry, [LagSpec(source_channel="knee", lag_steps=1)])


def test_telemetry_invariants():
    """Test channel length, count and name invariants."""
    a = Channel.from_samples("a", [1.0, 2.0, 3.0], 0.1)

    with pytest.raises(ValueError):
        Telemetry(channels=[a, Channel.from_samples("b", [1.0, 2.0], 0.1)], dt=0.1)
    with pytest.raises(ValueError):
        Telemetry(channels=[a, a], dt=0.1)
    with pytest.raises(ValueError):
        Telemetry(channels=[Channel.from_samples("c", [1.0], 0.1)], dt=0.1)
    with pytest.raises(ValueError):
        Telemetry(channels=[a], dt=0.0)
