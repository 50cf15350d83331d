"""Transition matrix estimation, propagation and forecasting."""

from typing import Any, List, Literal, Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist

from src.analysis.modal import stationary_distribution
from src.models.embedding import DelayPointSeries, EmbeddingRecipe
from src.models.markov import MarkovModel, MarkovScheme, StateDistribution
from src.models.states import CharacteristicPointSet
from src.utils.logger import get_logger

logger = get_logger(__name__)

# rows per cdist call when assigning long series
_CHUNK = 4096

Sparsify = Union[int, Literal["auto"], None]


def _squared_distances(points: np.ndarray, states: CharacteristicPointSet) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != states.dimension:
        raise ValueError(
            f"point dimension {points.shape[1]} != state dimension {states.dimension}"
        )
    return cdist(points, states.points, metric="sqeuclidean")


def assign_state(point: Any, states: CharacteristicPointSet) -> int:
    """Index of the nearest characteristic point (lowest index on ties)."""
    return int(np.argmin(_squared_distances(point, states)[0]))


def assign_states(points: Any, states: CharacteristicPointSet) -> np.ndarray:
    """Nearest characteristic point for every row of ``points``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.empty(points.shape[0], dtype=np.int64)
    for start in range(0, points.shape[0], _CHUNK):
        block = _squared_distances(points[start : start + _CHUNK], states)
        labels[start : start + _CHUNK] = np.argmin(block, axis=1)
    return labels


def fuzzy_memberships(points: Any, states: CharacteristicPointSet, alpha: float) -> np.ndarray:
    """Membership rows F_i = K_i / Σ K_j with kernel K_i = 1 / (R_i + α).

    Raises:
        ValueError: If alpha is not positive
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    rows = []
    for start in range(0, points.shape[0], _CHUNK):
        kernel = 1.0 / (_squared_distances(points[start : start + _CHUNK], states) + alpha)
        rows.append(kernel / kernel.sum(axis=1, keepdims=True))
    return np.vstack(rows)


def fuzzy_membership(
    point: Any, states: CharacteristicPointSet, alpha: float
) -> StateDistribution:
    """Fuzzy membership of a single point over all states."""
    return StateDistribution(probabilities=fuzzy_memberships(point, states, alpha)[0])


def _column_normalize(counts: np.ndarray) -> np.ndarray:
    """Divide columns by their sums; empty columns become self-loops."""
    sums = counts.sum(axis=0)
    matrix = np.divide(counts, sums, out=np.zeros_like(counts), where=sums > 0)
    empty = np.flatnonzero(sums <= 0)
    matrix[empty, empty] = 1.0
    return matrix


def transition_matrix_from_labels(
    labels: Sequence[int], n_states: int, stride: int = 1
) -> np.ndarray:
    """Column-stochastic matrix of label frequencies: count[b, a] for each a → b.

    Args:
        labels: State index per time step
        n_states: Number of states s
        stride: Steps between the two ends of a transition

    Returns:
        (s, s) column-stochastic matrix
    """
    labels = np.asarray(labels, dtype=np.int64)
    counts = np.zeros((n_states, n_states))
    np.add.at(counts, (labels[stride:], labels[:-stride]), 1.0)
    return _column_normalize(counts)


def transition_matrix_from_memberships(memberships: np.ndarray, stride: int = 1) -> np.ndarray:
    """Column-normalized sum of outer products F(t + stride)·F(t)ᵀ.

    Args:
        memberships: Array (length, s); each row a membership vector

    Returns:
        (s, s) column-stochastic matrix
    """
    memberships = np.asarray(memberships, dtype=float)
    counts = memberships[stride:].T @ memberships[:-stride]
    return _column_normalize(counts)


def _check_series(series: DelayPointSeries, stride: int) -> None:
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if series.length < stride + 1:
        raise ValueError(
            f"series of length {series.length} has no transitions at stride {stride}"
        )


def fit_crisp(
    series: DelayPointSeries,
    states: CharacteristicPointSet,
    stride: int = 1,
    recipe: Optional[EmbeddingRecipe] = None,
    seed: Optional[int] = None,
) -> MarkovModel:
    """Estimate M from transition frequencies between nearest characteristic points.

    Raises:
        ValueError: If the series has no transition at the given stride
    """
    _check_series(series, stride)
    labels = assign_states(series.points, states)
    matrix = transition_matrix_from_labels(labels, states.size, stride)
    model = MarkovModel(
        states=states,
        matrix=matrix,
        dt=series.dt * stride,
        scheme=MarkovScheme.CRISP,
        transition_count=float(series.length - stride),
        stride=stride,
        recipe=recipe,
        seed=seed,
    )
    logger.debug("Crisp model fitted", states=states.size, transitions=model.transition_count)
    return model


def fit_fuzzy(
    series: DelayPointSeries,
    states: CharacteristicPointSet,
    alpha: float,
    stride: int = 1,
    recipe: Optional[EmbeddingRecipe] = None,
    seed: Optional[int] = None,
) -> MarkovModel:
    """Estimate M from accumulated membership outer products F(t + Δt)·F(t)ᵀ.

    Raises:
        ValueError: If the series has no transition at the given stride or alpha <= 0
    """
    _check_series(series, stride)
    memberships = fuzzy_memberships(series.points, states, alpha)
    matrix = transition_matrix_from_memberships(memberships, stride)
    model = MarkovModel(
        states=states,
        matrix=matrix,
        dt=series.dt * stride,
        scheme=MarkovScheme.FUZZY,
        alpha=alpha,
        transition_count=float(series.length - stride),
        stride=stride,
        recipe=recipe,
        seed=seed,
    )
    logger.debug("Fuzzy model fitted", states=states.size, alpha=alpha)
    return model


def step(model: MarkovModel, p: StateDistribution) -> StateDistribution:
    """One propagation step P(t + Δt) = M·P(t).

    Raises:
        ValueError: If the distribution size differs from the model
    """
    if p.size != model.size:
        raise ValueError(f"distribution over {p.size} states, model has {model.size}")
    return StateDistribution(probabilities=model.matrix @ p.probabilities)


def _keep_largest(p: np.ndarray, m: int) -> np.ndarray:
    order = np.argsort(-p, kind="stable")
    kept = np.zeros_like(p)
    kept[order[:m]] = p[order[:m]]
    total = kept.sum()
    if total <= 0.0:
        raise RuntimeError("sparsified distribution lost all probability mass")
    return kept / total


def forecast(
    model: MarkovModel,
    p0: StateDistribution,
    n_steps: int,
    sparsify: Sparsify = "auto",
) -> List[StateDistribution]:
    """Iterate p ← M·p, optionally keeping only the m largest components.

    Discretization adds fictitious transitions that spread probability faster
    than the real process; keeping the N + 1 largest components after each step
    and renormalizing counters that.

    Args:
        model: Fitted model
        p0: Initial distribution
        n_steps: Number of steps to emit
        sparsify: Components kept per step; "auto" uses dimension estimate + 1,
            ``None`` disables truncation

    Returns:
        Distributions after 1..n_steps steps

    Raises:
        ValueError: On size mismatch, negative n_steps or m outside [1, s]
    """
    if p0.size != model.size:
        raise ValueError(f"distribution over {p0.size} states, model has {model.size}")
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    m = model.default_top_count if sparsify == "auto" else sparsify
    if m is not None and not 1 <= m <= model.size:
        raise ValueError(f"sparsify count {m} outside [1, {model.size}]")

    p = p0.probabilities.copy()
    out = []
    for _ in range(n_steps):
        p = model.matrix @ p
        if m is not None and m < model.size:
            p = _keep_largest(p, m)
        out.append(StateDistribution(probabilities=p))
    return out


def stationary(model: MarkovModel) -> StateDistribution:
    """Distribution π with M·π = π (the unit-eigenvalue eigenform).

    Raises:
        RuntimeError: If M has no eigenvalue within 1e-6 of one
    """
    return stationary_distribution(model.matrix)


def initial_distribution(model: MarkovModel, point: Any) -> StateDistribution:
    """Starting distribution for a delay-space point: indicator (crisp) or membership (fuzzy)."""
    if model.scheme == MarkovScheme.FUZZY:
        return fuzzy_membership(point, model.states, model.alpha or 0.0)
    return StateDistribution.point_mass(model.size, assign_state(point, model.states))


def expected_coordinates(
    model: MarkovModel, distributions: Sequence[StateDistribution]
) -> np.ndarray:
    """Probability-weighted mean of characteristic-point coordinates per distribution."""
    if not distributions:
        return np.empty((0, model.states.dimension))
    stacked = np.vstack([d.probabilities for d in distributions])
    return stacked @ model.states.points
