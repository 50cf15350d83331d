"""Per-run configuration: input, embedding recipe and analysis knobs."""

from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.config.settings import Settings, get_settings
from src.models.embedding import EmbeddingRecipe
from src.models.markov import MarkovScheme
from src.models.telemetry import LagSpec, OscillatorSpec, Telemetry

SparsifySetting = Union[int, Literal["auto", "none"]]

# config-file keys forwarded to OscillatorSpec when no input file is given
SYNTH_KEYS = {
    "synth_amplitude": "amplitude",
    "synth_damping_ratio": "damping_ratio",
    "synth_angular_frequency": "angular_frequency",
    "synth_phase": "phase",
    "synth_n_samples": "n_samples",
    "synth_noise_sd": "noise_sd",
}


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _pairs(value: str, what: str) -> List[List[str]]:
    pairs = []
    for item in _split(value):
        name, sep, rest = item.rpartition(":")
        if not sep or not name.strip() or not rest.strip():
            raise ValueError(f"{what} entry {item!r} is not of the form name:value")
        pairs.append([name.strip(), rest.strip()])
    return pairs


class RunConfig(BaseModel):
    """Everything one pipeline run needs; every numeric knob validated up front."""

    input: Optional[Path] = Field(default=None, description="Telemetry CSV")
    oscillator: Optional[OscillatorSpec] = Field(
        default=None, description="Synthetic oscillator used when no input file is given"
    )
    dt: Optional[float] = Field(default=None, gt=0.0, description="Sampling interval, seconds")
    errors: Dict[str, float] = Field(default_factory=dict, description="X_Δ per channel")
    default_error: Optional[float] = Field(default=None, gt=0.0, description="X_Δ fallback")
    axes: Optional[List[str]] = Field(default=None, description="Delay-space axes")
    lags: List[LagSpec] = Field(default_factory=list, description="Lagged channels")
    r0: float = Field(default=1.0, gt=0.0)
    k: float = Field(default=1.4, gt=0.0)
    alpha: Optional[float] = Field(default=None, gt=0.0, description="Fuzzy kernel offset")
    alpha_factor: float = Field(default=0.01, gt=0.0, description="α = factor·r0 when unset")
    scheme: MarkovScheme = MarkovScheme.CRISP
    cell_size: float = Field(default=1.0, gt=0.0)
    stride: int = Field(default=1, ge=1)
    forecast_stride: Optional[int] = Field(
        default=None, ge=1, description="Samples per forecasting model step; stride when unset"
    )
    sparsify: SparsifySetting = Field(default="auto", description="auto, none or m")
    seed: int = Field(default=42)
    output_dir: Path = Field(default=Path("output"))
    adequacy_threshold: float = Field(default=0.75, ge=0.0, le=1.0)
    dimension_percentile: float = Field(default=95.0, gt=0.0, le=100.0)

    model_config = ConfigDict(extra="forbid")

    @field_validator("errors", mode="before")
    @classmethod
    def parse_errors(cls, v: Any) -> Any:
        """Accept ``name:value,name:value``; every error must be positive."""
        if isinstance(v, str):
            v = {name: float(value) for name, value in _pairs(v, "errors")}
        for name, value in dict(v).items():
            if not float(value) > 0.0:
                raise ValueError(f"error for channel {name} must be > 0, got {value}")
        return v

    @field_validator("axes", mode="before")
    @classmethod
    def parse_axes(cls, v: Any) -> Any:
        """Accept ``a,b,c``."""
        if isinstance(v, str):
            v = _split(v)
        if v is not None and len(set(v)) != len(v):
            raise ValueError(f"axes must be unique, got {v}")
        return v

    @field_validator("lags", mode="before")
    @classmethod
    def parse_lags(cls, v: Any) -> Any:
        """Accept ``channel:steps,channel:steps``."""
        if isinstance(v, str):
            return [
                {"source_channel": name, "lag_steps": int(steps)}
                for name, steps in _pairs(v, "lags")
            ]
        return v

    @field_validator("sparsify", mode="before")
    @classmethod
    def parse_sparsify(cls, v: Any) -> Any:
        """``auto`` keeps N + 1 components, ``none`` disables truncation, an integer m >= 1."""
        if isinstance(v, str):
            text = v.strip().lower()
            if text in ("auto", "none"):
                return text
            v = int(text)
        if isinstance(v, int) and v < 1:
            raise ValueError(f"sparsify must be >= 1, got {v}")
        return v

    @model_validator(mode="after")
    def check_source(self) -> "RunConfig":
        """Exactly one data source; a file input needs dt."""
        if (self.input is None) == (self.oscillator is None):
            raise ValueError("give exactly one of an input file or synthetic oscillator parameters")
        if self.oscillator is not None:
            if self.dt is not None and self.dt != self.oscillator.dt:
                raise ValueError("dt disagrees with the oscillator sampling interval")
            self.dt = self.oscillator.dt
        elif self.dt is None:
            raise ValueError("dt is required with an input file")
        return self

    @property
    def resolved_alpha(self) -> float:
        """Fuzzy kernel offset: explicit alpha, else alpha_factor·r0."""
        return self.alpha if self.alpha is not None else self.alpha_factor * self.r0

    @property
    def resolved_forecast_stride(self) -> int:
        """Transition step of the model used for forecasts."""
        return self.stride if self.forecast_stride is None else self.forecast_stride

    @property
    def sparsify_count(self) -> Union[int, Literal["auto"], None]:
        """Sparsify argument for ``markov.forecast``."""
        return None if self.sparsify == "none" else self.sparsify

    def recipe_for(self, telemetry: Telemetry) -> EmbeddingRecipe:
        """Embedding recipe over the lag-augmented telemetry; axes default to every channel."""
        axes = self.axes or telemetry.channel_names
        return EmbeddingRecipe(
            axes=axes,
            errors=[telemetry.channel(name).error for name in axes],
            lags=self.lags,
            cell_size=self.cell_size,
        )


def _defaults(settings: Settings) -> Dict[str, Any]:
    return {
        "r0": settings.r0,
        "k": settings.k,
        "alpha_factor": settings.alpha_factor,
        "cell_size": settings.cell_size,
        "stride": settings.stride,
        "seed": settings.seed,
        "adequacy_threshold": settings.adequacy_threshold,
        "dimension_percentile": settings.dimension_percentile,
    }


def _read_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    values = {
        key.strip().lower(): value
        for key, value in dotenv_values(path, encoding="utf-8").items()
        if value is not None and value.strip() != ""
    }
    allowed = set(RunConfig.model_fields) | set(SYNTH_KEYS)
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {', '.join(unknown)}")
    return values


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    settings: Optional[Settings] = None,
) -> RunConfig:
    """Merge defaults, an optional key=value file and explicit overrides.

    Precedence is overrides > file > ``Settings``. Keys ``synth_*`` build an
    oscillator source sampled at ``dt``.

    Args:
        path: Optional config file (``key=value`` lines, ``#`` comments)
        overrides: Values from command-line flags; ``None`` entries are ignored
        settings: Defaults; ``get_settings()`` when omitted

    Returns:
        Validated run configuration

    Raises:
        FileNotFoundError: If ``path`` does not exist
        ValueError: On unknown keys or invalid values
    """
    settings = settings or get_settings()
    merged: Dict[str, Any] = _defaults(settings)
    if path is not None:
        merged.update(_read_file(path))
    merged.update({key: value for key, value in (overrides or {}).items() if value is not None})

    synth = {SYNTH_KEYS[key]: merged.pop(key) for key in list(merged) if key in SYNTH_KEYS}
    if synth:
        if merged.get("dt") is not None:
            synth["dt"] = merged["dt"]
        merged["oscillator"] = synth
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as err:
        raise ValueError(f"invalid run configuration: {err}") from err
