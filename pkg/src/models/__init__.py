"""Data models for delay-space Markov analysis."""

from src.models.embedding import DelayPointSeries, EmbeddingRecipe, EmbeddingSpec
from src.models.markov import MarkovModel, MarkovScheme, StateDistribution
from src.models.modal import ModalResult, ModeFrequency
from src.models.states import CharacteristicPointSet
from src.models.telemetry import Channel, LagSpec, OscillatorSpec, QuasiPeriodicSpec, Telemetry

__all__ = [
    "Channel",
    "Telemetry",
    "OscillatorSpec",
    "QuasiPeriodicSpec",
    "LagSpec",
    "EmbeddingSpec",
    "EmbeddingRecipe",
    "DelayPointSeries",
    "CharacteristicPointSet",
    "MarkovModel",
    "MarkovScheme",
    "StateDistribution",
    "ModalResult",
    "ModeFrequency",
]
