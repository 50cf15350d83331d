"""Plot-ready CSV tables: spectrum, eigenforms, forecasts and trajectories."""

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.analysis.modal import eigenform_table, mode_table
from src.models.markov import StateDistribution
from src.models.modal import ModalResult
from src.models.states import CharacteristicPointSet

FLOAT_FORMAT = "%.17g"

EIGEN_COLUMNS = [
    "mode",
    "re",
    "im",
    "modulus",
    "arg",
    "steps_per_cycle",
    "frequency_hz",
    "period_s",
    "damping",
]


def _write(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def eigen_frame(result: ModalResult) -> pd.DataFrame:
    """One row per mode; non-oscillatory modes leave n_i, f, T and ξ empty."""
    return pd.DataFrame(mode_table(result), columns=EIGEN_COLUMNS)


def write_eigen_table(result: ModalResult, path: Union[str, Path]) -> Path:
    """Write the mode table."""
    return _write(eigen_frame(result), path)


def write_eigenform_table(
    result: ModalResult,
    states: CharacteristicPointSet,
    path: Union[str, Path],
    modes: Optional[Sequence[int]] = None,
) -> Path:
    """Write characteristic-point coordinates with per-mode modulus and phase columns."""
    return _write(pd.DataFrame(eigenform_table(result, states, modes)), path)


def forecast_frame(distributions: Sequence[StateDistribution], size: int) -> pd.DataFrame:
    """One row per step (starting at 1), one ``p<i>`` column per state."""
    columns = [f"p{i}" for i in range(size)]
    if not distributions:
        return pd.DataFrame(columns=["step"] + columns)
    frame = pd.DataFrame(np.vstack([d.probabilities for d in distributions]), columns=columns)
    frame.insert(0, "step", np.arange(1, len(distributions) + 1))
    return frame


def write_forecast(
    distributions: Sequence[StateDistribution], size: int, path: Union[str, Path]
) -> Path:
    """Write per-step forecast distributions."""
    return _write(forecast_frame(distributions, size), path)


def trajectory_frame(
    axis_names: List[str],
    expected: np.ndarray,
    actual: Optional[np.ndarray] = None,
) -> pd.DataFrame:
    """Expected coordinates per step, alongside the observed trajectory when given.

    Columns are ``step``, ``expected_<axis>`` and, with ``actual``,
    ``actual_<axis>`` plus the Euclidean ``distance`` between the two.
    Rows run over the shorter of the two trajectories.
    """
    n = expected.shape[0] if actual is None else min(expected.shape[0], actual.shape[0])
    data: Dict[str, np.ndarray] = {"step": np.arange(1, n + 1)}
    for j, name in enumerate(axis_names):
        data[f"expected_{name}"] = expected[:n, j]
    if actual is not None:
        for j, name in enumerate(axis_names):
            data[f"actual_{name}"] = actual[:n, j]
        data["distance"] = np.linalg.norm(expected[:n] - actual[:n], axis=1)
    return pd.DataFrame(data)


def write_trajectory(
    axis_names: List[str],
    expected: np.ndarray,
    path: Union[str, Path],
    actual: Optional[np.ndarray] = None,
) -> Path:
    """Write the expected-versus-actual trajectory comparison."""
    return _write(trajectory_frame(axis_names, expected, actual), path)


def point_frame(states: CharacteristicPointSet) -> pd.DataFrame:
    """Characteristic-point coordinates with their neighbor counts."""
    frame = pd.DataFrame(states.points, columns=states.axis_names)
    frame["neighbors"] = states.neighbor_counts
    return frame


def write_point_table(states: CharacteristicPointSet, path: Union[str, Path]) -> Path:
    """Write the characteristic points."""
    return _write(point_frame(states), path)
