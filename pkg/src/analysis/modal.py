"""Modal analysis of column-stochastic transition matrices.

The matrix is decomposed as M = Φ·diag(λ)·Φ⁻¹ with right eigenvectors Φ. The
unit eigenvalue carries the stationary distribution; complex and negative
eigenvalues are damped oscillations of the state probabilities with
f = |arg λ| / (2π·Δt) and decrement ξ = ln|λ| / |arg λ|.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.models.markov import MarkovModel, StateDistribution
from src.models.modal import ModalResult, ModeFrequency
from src.models.states import CharacteristicPointSet
from src.utils.errors import ModalDecompositionError, PerronViolationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

PERRON_TOL = 1e-8
RESIDUAL_TOL = 1e-8
STATIONARY_EIGEN_TOL = 1e-6
STATIONARY_RESIDUAL_TOL = 1e-8
ZERO_EIGENVALUE = 1e-12
ILL_CONDITIONED = 1e8
DEFAULT_ATTRACTOR_TOL = 1e-3
DEFAULT_REAL_TOL = 1e-9

_LAZY_MAX_ITER = 200_000


def _eig(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    try:
        values, vectors = scipy.linalg.eig(matrix, right=True)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise ModalDecompositionError(f"eigensolver failed: {err}") from err
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise ModalDecompositionError("eigensolver returned non-finite values")
    return values, vectors


def _spectral_order(values: np.ndarray) -> np.ndarray:
    """Descending modulus; real first, then +Im before its conjugate, then larger Re."""
    modulus = np.round(np.abs(values), 10)
    abs_imag = np.round(np.abs(values.imag), 10)
    return np.lexsort((-values.real, -values.imag, abs_imag, -modulus))


def _is_single_signed(v: np.ndarray) -> bool:
    scale = np.max(np.abs(v))
    if scale == 0.0:
        return False
    return bool(np.all(v >= -1e-10 * scale) or np.all(v <= 1e-10 * scale))


def _lazy_power_iteration(matrix: np.ndarray) -> np.ndarray:
    """Stationary vector of the lazy chain (I + M)/2 from the uniform start."""
    s = matrix.shape[0]
    lazy = 0.5 * (np.eye(s) + matrix)
    p = np.full(s, 1.0 / s)
    for _ in range(_LAZY_MAX_ITER):
        nxt = lazy @ p
        if np.max(np.abs(nxt - p)) < 1e-14:
            return nxt
        p = nxt
    return p


def stationary_distribution(
    matrix: np.ndarray,
    values: Optional[np.ndarray] = None,
    vectors: Optional[np.ndarray] = None,
) -> StateDistribution:
    """Stationary distribution π with M·π = π of a column-stochastic matrix.

    Eigenvectors of eigenvalues within 1e-6 of one are tried in order; the first
    single-signed real part is normalized. When the unit eigenspace is degenerate
    and none is single-signed, the lazy chain is iterated to a convex
    representative instead.

    Raises:
        RuntimeError: If no eigenvalue is near one or the result is not stationary
    """
    matrix = np.asarray(matrix, dtype=float)
    if values is None or vectors is None:
        values, vectors = _eig(matrix)

    near_one = np.flatnonzero(np.abs(values - 1.0) <= STATIONARY_EIGEN_TOL)
    if near_one.size == 0:
        closest = values[np.argmin(np.abs(values - 1.0))]
        raise RuntimeError(
            f"no eigenvalue within {STATIONARY_EIGEN_TOL} of 1 (closest {closest:.12g}); "
            "the matrix is not stochastic"
        )

    pi = None
    for idx in near_one:
        candidate = vectors[:, idx].real
        if _is_single_signed(candidate):
            candidate = np.abs(candidate)
            pi = candidate / candidate.sum()
            break
    if pi is None:
        logger.debug("Degenerate unit eigenspace, iterating lazy chain", modes=near_one.size)
        pi = _lazy_power_iteration(matrix)
        pi = np.clip(pi, 0.0, None)
        pi = pi / pi.sum()

    residual = float(np.max(np.abs(matrix @ pi - pi)))
    if residual > STATIONARY_RESIDUAL_TOL:
        raise RuntimeError(f"stationary residual {residual:.3g} exceeds {STATIONARY_RESIDUAL_TOL}")
    return StateDistribution(probabilities=pi)


def mode_frequency(
    eigenvalue: complex, dt: float, real_tol: float = 0.0
) -> Optional[ModeFrequency]:
    """Oscillation frequency of a mode: n = 2π/|arg λ|, f = 1/(n·Δt), T = n·Δt.

    Args:
        eigenvalue: Mode eigenvalue λ
        dt: Step duration Δt, seconds
        real_tol: |Im λ| at or below which the mode counts as non-oscillatory

    Returns:
        Frequency, steps per cycle and period, or ``None`` for a zero-phase mode

    Raises:
        ValueError: If dt is not positive
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    lam = complex(eigenvalue)
    phase = abs(math.atan2(lam.imag, lam.real))
    if phase == 0.0 or (abs(lam.imag) <= real_tol and lam.real > 0.0):
        return None
    steps = 2.0 * math.pi / phase
    return ModeFrequency(frequency=1.0 / (steps * dt), steps_per_cycle=steps, period=steps * dt)


def mode_damping(eigenvalue: complex, frequency: Optional[float], dt: float) -> float:
    """Damping decrement ξ = ln|λ| / (2π·f·Δt) of an oscillatory mode.

    Raises:
        ValueError: If the mode is not oscillatory (f missing or not positive)
    """
    if frequency is None or frequency <= 0.0:
        raise ValueError("damping is only defined for oscillatory modes (f > 0)")
    return math.log(abs(complex(eigenvalue))) / (2.0 * math.pi * frequency * dt)


def _residuals(matrix: np.ndarray, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    applied = matrix @ vectors - vectors * values
    scale = np.max(np.abs(vectors), axis=0)
    scale[scale == 0.0] = 1.0
    return np.max(np.abs(applied), axis=0) / scale


def decompose(
    model: MarkovModel,
    attractor_tol: float = DEFAULT_ATTRACTOR_TOL,
    real_tol: float = DEFAULT_REAL_TOL,
) -> ModalResult:
    """Full spectrum and right eigenforms of the model's transition matrix.

    Raises:
        ModalDecompositionError: If the eigensolver fails
        PerronViolationError: If the leading eigenvalue is not a real unit eigenvalue
    """
    matrix = model.matrix
    values, vectors = _eig(matrix)
    order = _spectral_order(values)
    values, vectors = values[order], vectors[:, order]

    leading = complex(values[0])
    if abs(leading.imag) > PERRON_TOL or abs(leading - 1.0) > PERRON_TOL:
        raise PerronViolationError(leading)

    residuals = _residuals(matrix, values, vectors)
    if np.any(residuals > RESIDUAL_TOL):
        logger.warning(
            "Eigenpair residual above tolerance",
            worst=float(residuals.max()),
            modes=int(np.count_nonzero(residuals > RESIDUAL_TOL)),
        )

    condition = float(np.linalg.cond(vectors))
    if not condition < ILL_CONDITIONED:
        logger.warning("Ill-conditioned eigenvector matrix", condition_number=condition)

    frequencies: List[Optional[float]] = []
    periods: List[Optional[float]] = []
    steps: List[Optional[float]] = []
    damping: List[Optional[float]] = []
    for lam in values:
        mode = None if abs(lam) < ZERO_EIGENVALUE else mode_frequency(lam, model.dt, real_tol)
        if mode is None:
            frequencies.append(None)
            periods.append(None)
            steps.append(None)
            damping.append(None)
            continue
        frequencies.append(mode.frequency)
        periods.append(mode.period)
        steps.append(mode.steps_per_cycle)
        damping.append(mode_damping(lam, mode.frequency, model.dt))

    result = ModalResult(
        eigenvalues=values,
        eigenforms=vectors,
        frequencies=frequencies,
        periods=periods,
        steps_per_cycle=steps,
        damping=damping,
        attractor_count=int(np.count_nonzero(np.abs(values - 1.0) <= attractor_tol)),
        stationary=stationary_distribution(matrix, values, vectors),
        dt=model.dt,
        residuals=residuals,
        condition_number=condition,
    )
    logger.debug(
        "Transition matrix decomposed",
        modes=result.size,
        attractors=result.attractor_count,
        condition_number=condition,
    )
    return result


def attractor_count(result: ModalResult, tol: float = DEFAULT_ATTRACTOR_TOL) -> int:
    """Number of eigenvalues with |λ − 1| ≤ tol."""
    return int(np.count_nonzero(np.abs(result.eigenvalues - 1.0) <= tol))


def real_eigenvalue_count(result: ModalResult, tol: float = DEFAULT_REAL_TOL) -> int:
    """Number of eigenvalues with |Im λ| ≤ tol."""
    return int(np.count_nonzero(np.abs(result.eigenvalues.imag) <= tol))


def dominant_oscillatory_mode(
    result: ModalResult, real_tol: float = DEFAULT_REAL_TOL
) -> Optional[int]:
    """Index of the largest-|λ| mode with a non-zero phase, if any."""
    for idx, lam in enumerate(result.eigenvalues):
        if abs(lam) < ZERO_EIGENVALUE:
            break
        if mode_frequency(lam, result.dt, real_tol) is not None:
            return idx
    return None


def mode_table(result: ModalResult) -> List[Dict[str, Optional[float]]]:
    """One row per mode: re, im, |λ|, arg, n_i, f, T, ξ."""
    rows = []
    for idx, lam in enumerate(result.eigenvalues):
        rows.append(
            {
                "mode": idx,
                "re": float(lam.real),
                "im": float(lam.imag),
                "modulus": float(abs(lam)),
                "arg": float(np.angle(lam)),
                "steps_per_cycle": result.steps_per_cycle[idx],
                "frequency_hz": result.frequencies[idx],
                "period_s": result.periods[idx],
                "damping": result.damping[idx],
            }
        )
    return rows


def _normalized_form(form: np.ndarray, stationary_mode: bool) -> np.ndarray:
    if stationary_mode:
        total = form.sum()
        if abs(total) > 1e-12:
            return form / total
    peak_idx = int(np.argmax(np.abs(form)))
    peak = form[peak_idx]
    if peak == 0:
        return form
    normalized = form / peak
    normalized[peak_idx] = 1.0
    return normalized


def eigenform_table(
    result: ModalResult,
    states: CharacteristicPointSet,
    modes: Optional[Sequence[int]] = None,
    attractor_tol: float = DEFAULT_ATTRACTOR_TOL,
) -> List[Dict[str, float]]:
    """Per characteristic point: coordinates, then |φ_m| and arg φ_m for each mode.

    Unit-eigenvalue forms are normalized to sum one; other forms to unit
    maximum modulus with phase zero at their first peak. Phases lie in [0, 2π).

    Raises:
        ValueError: If the result and states disagree on size or a mode is out of range
    """
    if result.size != states.size:
        raise ValueError(f"{result.size} modes for {states.size} characteristic points")
    if modes is None:
        modes = list(range(min(3, result.size)))
    for m in modes:
        if not 0 <= m < result.size:
            raise ValueError(f"mode {m} out of range [0, {result.size})")

    forms = {}
    for m in modes:
        is_stationary = abs(result.eigenvalues[m] - 1.0) <= attractor_tol
        forms[m] = _normalized_form(result.eigenforms[:, m], is_stationary)

    rows = []
    for i in range(states.size):
        row: Dict[str, float] = {
            name: float(states.points[i, j]) for j, name in enumerate(states.axis_names)
        }
        for m in modes:
            value = forms[m][i]
            row[f"mode{m}_modulus"] = float(abs(value))
            phase = float(np.mod(np.angle(value), 2.0 * np.pi))
            row[f"mode{m}_phase"] = 0.0 if phase >= 2.0 * np.pi else phase
        rows.append(row)
    return rows


def reconstruction_error(result: ModalResult, model: MarkovModel) -> Optional[float]:
    """‖Φ·diag(λ)·Φ⁻¹ − M‖∞, or ``None`` when Φ is too ill-conditioned to invert."""
    if not result.condition_number < ILL_CONDITIONED:
        logger.warning(
            "Skipping reconstruction check", condition_number=result.condition_number
        )
        return None
    phi = result.eigenforms
    rebuilt = phi @ np.diag(result.eigenvalues) @ np.linalg.inv(phi)
    return float(np.max(np.abs(rebuilt - model.matrix)))
