"""Unit tests for the modal analysis of transition matrices."""

import cmath
import math

import numpy as np
import pytest
import scipy.linalg

from src.analysis.modal import (
    attractor_count,
    decompose,
    dominant_oscillatory_mode,
    eigenform_table,
    mode_damping,
    mode_frequency,
    mode_table,
    real_eigenvalue_count,
    reconstruction_error,
    stationary_distribution,
)
from src.utils.errors import PerronViolationError
from tests.fixtures.sample_data import (
    create_cycle_model,
    create_identity_model,
    create_line_point_set,
    create_model,
    create_two_state_model,
)


def test_decompose_identity():
    """Test every state of the identity model is an attractor."""
    result = decompose(create_identity_model(3))

    np.testing.assert_allclose(result.eigenvalues, [1, 1, 1])
    assert result.attractor_count == 3
    assert all(f is None for f in result.frequencies)
    assert all(d is None for d in result.damping)


def test_decompose_two_state():
    """Test the symmetric two-state chain has spectrum {1, 0.8}."""
    result = decompose(create_two_state_model(0.9, 0.9))

    np.testing.assert_allclose(result.eigenvalues, [1.0, 0.8], atol=1e-12)
    np.testing.assert_allclose(result.stationary.probabilities, [0.5, 0.5], atol=1e-12)
    assert result.attractor_count == 1
    assert result.frequencies == [None, None]


def test_decompose_three_cycle():
    """Test the 3-cycle spectrum, ordering and period of three steps."""
    result = decompose(create_cycle_model(3, dt=0.5))

    expected = [1.0, cmath.exp(2j * math.pi / 3), cmath.exp(-2j * math.pi / 3)]
    np.testing.assert_allclose(result.eigenvalues, expected, atol=1e-10)
    assert result.frequencies[0] is None
    assert result.periods[1] == pytest.approx(1.5)
    assert result.periods[2] == pytest.approx(1.5)
    assert result.steps_per_cycle[1] == pytest.approx(3.0)
    assert result.damping[1] == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(result.stationary.probabilities, 1 / 3)
    assert dominant_oscillatory_mode(result) == 1


def test_mode_frequency_examples():
    """Test f and n for a cube root of unity, a real mode and a Nyquist mode."""
    cube = mode_frequency(cmath.exp(2j * math.pi / 3), dt=1.0)
    assert cube.steps_per_cycle == pytest.approx(3.0)
    assert cube.frequency == pytest.approx(1 / 3)
    assert cube.period == pytest.approx(3.0)

    assert mode_frequency(0.8, dt=0.01) is None

    nyquist = mode_frequency(-0.5, dt=0.01)
    assert nyquist.frequency == pytest.approx(50.0)
    assert nyquist.steps_per_cycle == pytest.approx(2.0)


def test_mode_frequency_real_tolerance():
    """Test a tiny imaginary part counts as real only within the tolerance."""
    lam = complex(0.9, 1e-12)

    assert mode_frequency(lam, dt=1.0, real_tol=1e-9) is None
    assert mode_frequency(lam, dt=1.0) is not None
    with pytest.raises(ValueError):
        mode_frequency(lam, dt=0.0)


def test_mode_frequency_conjugates_agree():
    """Test λ and its conjugate share one frequency."""
    lam = 0.7 * cmath.exp(0.4j)

    assert mode_frequency(lam, 0.1).frequency == pytest.approx(
        mode_frequency(lam.conjugate(), 0.1).frequency
    )


@pytest.mark.parametrize(
    "phase,expected",
    [
        (math.pi / 4, -0.13414),
        (math.pi / 2, -0.06707),
    ],
)
def test_mode_damping_examples(phase, expected):
    """Test ξ = ln|λ| / arg λ for |λ| = 0.9."""
    lam = 0.9 * cmath.exp(1j * phase)
    dt = 0.02
    f = mode_frequency(lam, dt).frequency

    assert mode_damping(lam, f, dt) == pytest.approx(expected, abs=1e-5)


def test_mode_damping_requires_oscillation():
    """Test ξ is undefined without a positive frequency."""
    with pytest.raises(ValueError, match="oscillatory"):
        mode_damping(0.8, None, 0.01)
    with pytest.raises(ValueError):
        mode_damping(0.8, 0.0, 0.01)


def test_block_diagonal_model_has_two_attractors():
    """Test two disjoint chains contribute one unit eigenvalue each."""
    block = np.array([[0.6, 0.3], [0.4, 0.7]])
    model = create_model(scipy.linalg.block_diag(block, block.T / block.T.sum(axis=0)))

    result = decompose(model)

    assert result.attractor_count == 2
    assert attractor_count(result) == 2
    pi = result.stationary.probabilities
    np.testing.assert_allclose(model.matrix @ pi, pi, atol=1e-10)


def test_real_eigenvalue_count():
    """Test counts of real modes for the 3-cycle and a symmetric chain."""
    assert real_eigenvalue_count(decompose(create_cycle_model(3))) == 1
    assert real_eigenvalue_count(decompose(create_two_state_model(0.6, 0.3))) == 2


def test_decompose_two_by_two_grid_matches_closed_form():
    """Test eigenvalues on a 20×20 grid match the roots 1 and 1 − a − b."""
    for a in np.linspace(0.0, 1.0, 20):
        for b in np.linspace(0.0, 1.0, 20):
            matrix = np.array([[1.0 - a, b], [a, 1.0 - b]])
            result = decompose(create_model(matrix))

            expected = sorted([1.0, 1.0 - a - b], key=lambda v: (-round(abs(v), 10), -v))
            np.testing.assert_allclose(result.eigenvalues, expected, atol=1e-10)


def test_decompose_spectrum_properties():
    """Test ordering, conjugate closure and residuals on a random chain."""
    rng = np.random.default_rng(8)
    counts = rng.uniform(size=(12, 12))
    model = create_model(counts / counts.sum(axis=0))

    result = decompose(model)
    values = result.eigenvalues

    assert np.all(np.diff(np.abs(values)) <= 1e-10)
    for lam in values:
        assert np.min(np.abs(values - np.conj(lam))) <= 1e-9
    assert np.all(result.residuals <= 1e-8)
    for idx, lam in enumerate(values):
        if lam.imag > 1e-9:
            assert values[idx + 1] == pytest.approx(np.conj(lam))


def test_reconstruction_error_small():
    """Test Φ·diag(λ)·Φ⁻¹ reproduces a diagonalizable matrix."""
    model = create_two_state_model(0.7, 0.2)
    result = decompose(model)

    assert reconstruction_error(result, model) < 1e-12
    assert result.condition_number < 1e8


def test_perron_violation_is_reported():
    """Test a leading eigenvalue away from one raises PerronViolationError."""
    model = create_two_state_model(0.9, 0.9)
    tampered = model.model_copy(update={"matrix": np.array([[0.5, 0.0], [0.0, 0.5]])})

    with pytest.raises(PerronViolationError) as exc_info:
        decompose(tampered)

    assert exc_info.value.eigenvalue == pytest.approx(0.5)


def test_stationary_distribution_requires_unit_eigenvalue():
    """Test a matrix without an eigenvalue near one is rejected."""
    with pytest.raises(RuntimeError, match="no eigenvalue"):
        stationary_distribution(np.array([[0.5, 0.0], [0.0, 0.5]]))


def test_stationary_distribution_degenerate_unit_eigenspace():
    """Test a reducible chain still yields a stationary distribution."""
    matrix = np.array(
        [
            [1.0, 0.0, 0.25],
            [0.0, 1.0, 0.25],
            [0.0, 0.0, 0.5],
        ]
    )

    pi = stationary_distribution(matrix).probabilities

    np.testing.assert_allclose(matrix @ pi, pi, atol=1e-10)
    assert pi[2] == pytest.approx(0.0, abs=1e-10)


def test_mode_table_rows():
    """Test one row per mode with frequency fields only for oscillations."""
    rows = mode_table(decompose(create_cycle_model(3, dt=0.1)))

    assert [row["mode"] for row in rows] == [0, 1, 2]
    assert rows[0]["frequency_hz"] is None
    assert rows[0]["modulus"] == pytest.approx(1.0)
    assert rows[1]["period_s"] == pytest.approx(0.3)
    assert rows[1]["arg"] == pytest.approx(2 * math.pi / 3)
    assert rows[2]["arg"] == pytest.approx(-2 * math.pi / 3)


def test_eigenform_table_three_cycle_phases():
    """Test the stationary form is uniform and the first oscillation steps by 2π/3."""
    model = create_cycle_model(3)
    result = decompose(model)

    rows = eigenform_table(result, model.states)

    assert len(rows) == 3
    assert set(rows[0]) >= {"a", "b", "mode0_modulus", "mode0_phase", "mode2_phase"}
    for row in rows:
        assert row["mode0_modulus"] == pytest.approx(1 / 3)
        assert row["mode1_modulus"] == pytest.approx(1.0)
        assert 0.0 <= row["mode1_phase"] < 2 * math.pi
    phases = np.array([row["mode1_phase"] for row in rows])
    steps = np.mod(np.diff(phases), 2 * math.pi)
    np.testing.assert_allclose(steps, steps[0])
    assert min(steps[0], 2 * math.pi - steps[0]) == pytest.approx(2 * math.pi / 3)


def test_eigenform_table_validates_modes():
    """Test mismatched states and out-of-range modes are rejected."""
    model = create_cycle_model(3)
    result = decompose(model)

    with pytest.raises(ValueError, match="out of range"):
        eigenform_table(result, model.states, modes=[3])
    with pytest.raises(ValueError):
        eigenform_table(result, create_line_point_set(4))
