"""Reconstruction pipeline: telemetry to a fitted Markov model and its analyses."""

import time
from contextlib import contextmanager
from typing import Any, ContextManager, Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.analysis import embedding, markov, modal, signals, states
from src.config.run_config import RunConfig
from src.config.settings import Settings, get_settings
from src.models.embedding import DelayPointSeries, EmbeddingRecipe
from src.models.markov import MarkovModel, MarkovScheme, StateDistribution
from src.models.modal import ModalResult
from src.models.states import CharacteristicPointSet
from src.models.telemetry import Channel, Telemetry
from src.utils.errors import PipelineStageError
from src.utils.logger import LoggerMixin, get_logger


STAGES = ("ingest", "lags", "embed", "states", "fit", "modal", "forecast", "export")


@contextmanager
def pipeline_stage(
    name: str,
    logger: Optional[Any] = None,
    timings: Optional[Dict[str, float]] = None,
    **context: Any,
) -> Iterator[None]:
    """Log a stage and label any input or numerical failure inside it with ``name``.

    Raises:
        ValueError: If ``name`` is not one of ``STAGES``
        PipelineStageError: Wrapping the original exception
    """
    if name not in STAGES:
        raise ValueError(f"unknown pipeline stage {name!r}, expected one of {STAGES}")
    log = logger or get_logger(__name__)
    log.info("Stage started", stage=name, **context)
    started = time.perf_counter()
    try:
        yield
    except PipelineStageError:
        raise
    except (ValueError, RuntimeError, OSError) as err:
        log.error("Stage failed", stage=name, error=str(err))
        raise PipelineStageError(name, err) from err
    elapsed = time.perf_counter() - started
    if timings is not None:
        timings[name] = elapsed
    log.info("Stage finished", stage=name, seconds=round(elapsed, 4))


class FitReport(BaseModel):
    """Summary numbers of one fit."""

    n_samples: int = Field(..., description="Samples after lag alignment")
    n_points: int = Field(..., description="Characteristic points s")
    dimension_estimate: int = Field(..., description="Dimension estimate N")
    robust_max_neighbors: int = Field(..., description="Percentile neighbor count n*")
    adequacy_fraction: float = Field(..., description="Share of points with > 2 neighbors")
    adequate: bool = Field(..., description="Adequacy fraction reached the threshold")
    information_estimate: Optional[float] = Field(
        default=None, description="Σ ln(X_max / X_Δ), nats; None below resolution"
    )
    cells_per_axis: List[int] = Field(..., description="Grid cells per axis")
    occupied_cells: int = Field(..., description="Distinct grid cells visited")
    transitions: float = Field(..., description="Observed transitions")
    scheme: MarkovScheme
    seed: int

    model_config = ConfigDict(frozen=True)


class FitOutcome(BaseModel):
    """Artifacts of a fit run."""

    telemetry: Telemetry
    series: DelayPointSeries
    model: MarkovModel
    report: FitReport

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class ReconstructionPipeline(LoggerMixin):
    """Runs ingest → lags → embed → states → fit, labelling failures by stage."""

    def __init__(self, config: RunConfig, settings: Optional[Settings] = None) -> None:
        """Initialize the pipeline.

        Args:
            config: Run configuration
            settings: Application settings (tolerances for modal analysis)
        """
        self.config = config
        self.settings = settings or get_settings()
        self.stage_times: Dict[str, float] = {}

    def stage(self, name: str, **context: Any) -> ContextManager[None]:
        """Context in which failures are re-raised as ``PipelineStageError(name)``."""
        return pipeline_stage(name, self.logger, self.stage_times, **context)

    def ingest(self) -> Telemetry:
        """Load the configured CSV or synthesize the configured oscillator."""
        cfg = self.config
        with self.stage("ingest", source=str(cfg.input) if cfg.input else "oscillator"):
            if cfg.input is not None:
                telemetry = signals.load_csv(
                    cfg.input, dt=cfg.dt, errors=cfg.errors, default_error=cfg.default_error
                )
            else:
                telemetry = signals.synth_oscillator(cfg.oscillator, seed=cfg.seed)
                if cfg.errors:
                    telemetry = _with_errors(telemetry, cfg.errors)
        return telemetry

    def add_lags(self, telemetry: Telemetry) -> Telemetry:
        """Append the configured lagged channels."""
        with self.stage("lags", lags=len(self.config.lags)):
            return signals.add_lag_channels(telemetry, self.config.lags)

    def embed(self, telemetry: Telemetry) -> Tuple[EmbeddingRecipe, DelayPointSeries]:
        """Build the recipe and the normalized delay-space series."""
        with self.stage("embed"):
            recipe = self.config.recipe_for(telemetry)
            series = embedding.embed(telemetry, recipe.spec)
        return recipe, series

    def select(self, series: DelayPointSeries) -> CharacteristicPointSet:
        """Select characteristic points and estimate dimension and adequacy."""
        cfg = self.config
        with self.stage("states", n_points=series.length, r0=cfg.r0):
            return states.select_points(
                series, r0=cfg.r0, k=cfg.k, percentile=cfg.dimension_percentile
            )

    def fit_model(
        self,
        series: DelayPointSeries,
        point_set: CharacteristicPointSet,
        recipe: Optional[EmbeddingRecipe] = None,
        stride: Optional[int] = None,
    ) -> MarkovModel:
        """Estimate the transition matrix with the configured scheme.

        Args:
            series: Normalized delay-space series
            point_set: Characteristic points (the states)
            recipe: Embedding recipe stored with the model
            stride: Samples per transition step; the configured stride when omitted
        """
        cfg = self.config
        stride = cfg.stride if stride is None else stride
        with self.stage("fit", scheme=cfg.scheme.value, n_states=point_set.size, stride=stride):
            if cfg.scheme == MarkovScheme.FUZZY:
                return markov.fit_fuzzy(
                    series,
                    point_set,
                    alpha=cfg.resolved_alpha,
                    stride=stride,
                    recipe=recipe,
                    seed=cfg.seed,
                )
            return markov.fit_crisp(
                series, point_set, stride=stride, recipe=recipe, seed=cfg.seed
            )

    def report(
        self, telemetry: Telemetry, series: DelayPointSeries, model: MarkovModel
    ) -> FitReport:
        """Summarize a fit."""
        cfg = self.config
        point_set = model.states
        fraction, adequate = states.adequacy(point_set, cfg.adequacy_threshold)
        try:
            information = embedding.information_estimate(telemetry, self.source_channels(telemetry))
        except ValueError as err:
            self.logger.warning("Information estimate unavailable", reason=str(err))
            information = None
        counts = point_set.neighbor_counts
        robust_max = (
            int(np.percentile(counts, cfg.dimension_percentile, method="nearest"))
            if counts.size
            else 0
        )
        return FitReport(
            n_samples=telemetry.length,
            n_points=point_set.size,
            dimension_estimate=point_set.dimension_estimate,
            robust_max_neighbors=robust_max,
            adequacy_fraction=fraction,
            adequate=adequate,
            information_estimate=information,
            cells_per_axis=embedding.cells_per_axis(series, cfg.cell_size),
            occupied_cells=embedding.occupied_cells(series, cfg.cell_size),
            transitions=model.transition_count,
            scheme=model.scheme,
            seed=cfg.seed,
        )

    def source_channels(self, telemetry: Telemetry) -> List[str]:
        """Channels measured by an instrument, i.e. without the derived lag copies."""
        derived = {lag.channel_name for lag in self.config.lags}
        return [name for name in telemetry.channel_names if name not in derived]

    def prepare(self) -> Tuple[Telemetry, EmbeddingRecipe, DelayPointSeries]:
        """Ingest, add lags and embed; returns (telemetry, recipe, series)."""
        telemetry = self.add_lags(self.ingest())
        recipe, series = self.embed(telemetry)
        return telemetry, recipe, series

    def run(self) -> FitOutcome:
        """Run every stage through the fit.

        Returns:
            Telemetry, series, model and report

        Raises:
            PipelineStageError: Labelled with the failing stage
        """
        telemetry, recipe, series = self.prepare()
        point_set = self.select(series)
        model = self.fit_model(series, point_set, recipe)
        report = self.report(telemetry, series, model)
        if not report.adequate:
            self.logger.warning(
                "Model is under-trained",
                adequacy_fraction=round(report.adequacy_fraction, 4),
                threshold=self.config.adequacy_threshold,
            )
        self.logger.info(
            "Fit complete",
            n_states=report.n_points,
            dimension=report.dimension_estimate,
            adequacy_fraction=round(report.adequacy_fraction, 4),
        )
        return FitOutcome(telemetry=telemetry, series=series, model=model, report=report)

    def forecast_model(self, outcome: FitOutcome) -> MarkovModel:
        """Model for forecasting: the fitted model refit at the forecast stride if it differs.

        The states are reused, so distributions over both models share their indices.
        """
        stride = self.config.resolved_forecast_stride
        if stride == outcome.model.stride:
            return outcome.model
        return self.fit_model(outcome.series, outcome.model.states, outcome.model.recipe, stride)

    def analyze(self, model: MarkovModel) -> ModalResult:
        """Modal analysis with the configured tolerances."""
        with self.stage("modal", n_states=model.size):
            return modal.decompose(
                model,
                attractor_tol=self.settings.attractor_tol,
                real_tol=self.settings.real_tol,
            )

    def forecast(
        self, model: MarkovModel, p0: StateDistribution, n_steps: int
    ) -> List[StateDistribution]:
        """Sparsified forecast with the configured truncation."""
        with self.stage("forecast", steps=n_steps, sparsify=str(self.config.sparsify)):
            return markov.forecast(model, p0, n_steps, sparsify=self.config.sparsify_count)


def _with_errors(telemetry: Telemetry, errors: Dict[str, float]) -> Telemetry:
    """Re-derive channels with overriding measurement errors."""
    for name in errors:
        telemetry.channel(name)
    channels = [
        Channel.from_samples(c.name, c.samples, errors.get(c.name, c.error))
        for c in telemetry.channels
    ]
    return Telemetry(channels=channels, dt=telemetry.dt)
