"""Markov model and state distribution models."""

from enum import Enum
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.arrays import frozen_array
from src.models.embedding import EmbeddingRecipe
from src.models.states import CharacteristicPointSet

STOCHASTIC_TOL = 1e-9


class MarkovScheme(str, Enum):
    """How observations are turned into transition counts."""

    CRISP = "crisp"
    FUZZY = "fuzzy"


class StateDistribution(BaseModel):
    """Probability vector over characteristic points."""

    probabilities: np.ndarray = Field(..., description="Length-s probability vector")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("probabilities", mode="before")
    @classmethod
    def freeze_probabilities(cls, v: Any) -> np.ndarray:
        """Entries are non-negative and sum to one."""
        arr = frozen_array(v, ndim=1, name="probabilities")
        if arr.size == 0:
            raise ValueError("a distribution needs at least one state")
        if arr.min() < -STOCHASTIC_TOL:
            raise ValueError(f"negative probability {arr.min()}")
        if abs(float(arr.sum()) - 1.0) > STOCHASTIC_TOL:
            raise ValueError(f"probabilities sum to {arr.sum()}, expected 1")
        return arr

    @classmethod
    def point_mass(cls, size: int, index: int) -> "StateDistribution":
        """All probability on one state.

        Raises:
            ValueError: If the index is out of range
        """
        if not 0 <= index < size:
            raise ValueError(f"state index {index} out of range [0, {size})")
        p = np.zeros(size)
        p[index] = 1.0
        return cls(probabilities=p)

    @classmethod
    def uniform(cls, size: int) -> "StateDistribution":
        """Equal probability on every state."""
        return cls(probabilities=np.full(size, 1.0 / size))

    @property
    def size(self) -> int:
        """Number of states."""
        return int(self.probabilities.shape[0])


class MarkovModel(BaseModel):
    """Characteristic points plus a column-stochastic transition matrix.

    ``matrix[i, j]`` is the probability of moving to state ``i`` from state ``j``
    over one step ``dt``, so ``P(t + dt) = matrix @ P(t)``.
    """

    states: CharacteristicPointSet = Field(..., description="Discrete states")
    matrix: np.ndarray = Field(..., description="Column-stochastic (s, s) matrix")
    dt: float = Field(..., gt=0.0, description="Duration of one transition step, seconds")
    scheme: MarkovScheme = Field(default=MarkovScheme.CRISP, description="Estimation scheme")
    alpha: Optional[float] = Field(default=None, gt=0.0, description="Fuzzy kernel offset α")
    transition_count: float = Field(..., ge=0.0, description="Observed transitions")
    stride: int = Field(default=1, ge=1, description="Samples per transition step")
    recipe: Optional[EmbeddingRecipe] = Field(default=None, description="Embedding recipe")
    seed: Optional[int] = Field(default=None, description="Seed recorded for reproducibility")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("matrix", mode="before")
    @classmethod
    def freeze_matrix(cls, v: Any) -> np.ndarray:
        """Store the matrix as a read-only 2-D array."""
        return frozen_array(v, ndim=2, name="matrix")

    @model_validator(mode="after")
    def check_matrix(self) -> "MarkovModel":
        """Square, sized to the states, entries in [0, 1], columns summing to one."""
        s = self.states.size
        if self.matrix.shape != (s, s):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match {s} states")
        if self.matrix.min() < -STOCHASTIC_TOL or self.matrix.max() > 1.0 + STOCHASTIC_TOL:
            raise ValueError("matrix entries must lie in [0, 1]")
        sums = self.matrix.sum(axis=0)
        worst = int(np.argmax(np.abs(sums - 1.0)))
        if abs(sums[worst] - 1.0) > STOCHASTIC_TOL:
            raise ValueError(f"column {worst} sums to {sums[worst]}, expected 1")
        if self.scheme == MarkovScheme.FUZZY and self.alpha is None:
            raise ValueError("fuzzy models need a kernel offset alpha")
        if self.recipe is not None and self.recipe.axes != self.states.axis_names:
            raise ValueError("embedding recipe axes differ from the state axes")
        return self

    @property
    def size(self) -> int:
        """Number of states s."""
        return self.states.size

    @property
    def default_top_count(self) -> int:
        """Components kept by sparsified forecasts: dimension estimate + 1, at most s."""
        return min(self.states.dimension_estimate + 1, self.size)
