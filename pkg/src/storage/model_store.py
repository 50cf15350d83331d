"""JSON persistence of fitted Markov models."""

from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.models.embedding import EmbeddingRecipe
from src.models.markov import MarkovModel, MarkovScheme
from src.models.states import CharacteristicPointSet
from src.utils.errors import ModelFileError
from src.utils.logger import get_logger

logger = get_logger(__name__)

FORMAT_VERSION = 1


class ModelDocument(BaseModel):
    """On-disk layout of a model; ``matrix`` is column-major (a list of columns)."""

    format_version: int = Field(default=FORMAT_VERSION, description="Document layout version")
    axis_names: List[str] = Field(..., min_length=1)
    r0: float = Field(..., gt=0.0)
    k: float = Field(..., gt=0.0)
    alpha: Optional[float] = Field(default=None, gt=0.0)
    dt: float = Field(..., gt=0.0)
    points: List[List[float]] = Field(..., min_length=1)
    matrix: List[List[float]] = Field(..., min_length=1)
    scheme: MarkovScheme = MarkovScheme.CRISP
    transition_count: float = Field(..., ge=0.0)
    dimension_estimate: int = Field(..., ge=1)
    neighbor_counts: List[int] = Field(..., min_length=1)
    adequacy_fraction: float = Field(..., ge=0.0, le=1.0)
    stride: int = Field(default=1, ge=1)
    embedding: Optional[EmbeddingRecipe] = None
    seed: Optional[int] = None

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_model(cls, model: MarkovModel) -> "ModelDocument":
        """Snapshot a fitted model."""
        states = model.states
        return cls(
            axis_names=states.axis_names,
            r0=states.r0,
            k=states.k,
            alpha=model.alpha,
            dt=model.dt,
            points=states.points.tolist(),
            matrix=model.matrix.T.tolist(),
            scheme=model.scheme,
            transition_count=model.transition_count,
            dimension_estimate=states.dimension_estimate,
            neighbor_counts=states.neighbor_counts.tolist(),
            adequacy_fraction=states.adequacy_fraction,
            stride=model.stride,
            embedding=model.recipe,
            seed=model.seed,
        )

    def to_model(self) -> MarkovModel:
        """Rebuild the domain model, re-running every model invariant."""
        states = CharacteristicPointSet(
            points=np.asarray(self.points, dtype=float),
            axis_names=self.axis_names,
            r0=self.r0,
            k=self.k,
            neighbor_counts=np.asarray(self.neighbor_counts, dtype=np.int64),
            dimension_estimate=self.dimension_estimate,
            adequacy_fraction=self.adequacy_fraction,
        )
        return MarkovModel(
            states=states,
            matrix=np.asarray(self.matrix, dtype=float).T,
            dt=self.dt,
            scheme=self.scheme,
            alpha=self.alpha,
            transition_count=self.transition_count,
            stride=self.stride,
            recipe=self.embedding,
            seed=self.seed,
        )


def save_model(model: MarkovModel, path: Union[str, Path]) -> Path:
    """Write a model as a JSON document.

    Floats are written in shortest round-trip form, so a reload reproduces
    every value bit for bit.

    Args:
        model: Fitted model
        path: Destination file; parent directories are created

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = ModelDocument.from_model(model)
    path.write_text(document.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Model saved", path=str(path), states=model.size, scheme=model.scheme.value)
    return path


def load_model(path: Union[str, Path]) -> MarkovModel:
    """Read and validate a model document.

    Raises:
        FileNotFoundError: If the file does not exist
        ModelFileError: If the document is malformed or violates a model invariant
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"model file not found: {path}")
    try:
        document = ModelDocument.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as err:
        raise ModelFileError(f"{path}: invalid model document: {err}") from err
    if document.format_version != FORMAT_VERSION:
        raise ModelFileError(
            f"{path}: unsupported format version {document.format_version}"
        )
    try:
        model = document.to_model()
    except (ValidationError, ValueError) as err:
        raise ModelFileError(f"{path}: inconsistent model: {err}") from err
    logger.debug("Model loaded", path=str(path), states=model.size)
    return model
