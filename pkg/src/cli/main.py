"""Command-line interface: synth, fit, modal, forecast, dimension and info."""

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.analysis import embedding, markov, modal, signals, states
from src.config.run_config import RunConfig, load_run_config
from src.config.settings import Settings, get_settings
from src.models.markov import MarkovModel, MarkovScheme, StateDistribution
from src.models.telemetry import OscillatorSpec
from src.pipeline.reconstruction import ReconstructionPipeline, pipeline_stage
from src.storage import (
    load_model,
    save_model,
    write_eigen_table,
    write_eigenform_table,
    write_forecast,
    write_point_table,
    write_trajectory,
)
from src.utils.errors import PipelineStageError
from src.utils.logger import configure_logging, get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WARNING = 2

SUMMARY_RULE = "=" * 60


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the hard-error code."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _summary(title: str, rows: Sequence[tuple]) -> None:
    print(SUMMARY_RULE)
    print(title)
    print(SUMMARY_RULE)
    for key, value in rows:
        print(f"{key}: {value}")


def _fmt(value: Optional[float], digits: int = 6) -> str:
    return "-" if value is None else f"{value:.{digits}g}"


def cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    """Write a damped-oscillator telemetry CSV."""
    seed = settings.seed if args.seed is None else args.seed
    with pipeline_stage("ingest", generator="oscillator", seed=seed):
        spec = OscillatorSpec(
            amplitude=args.A,
            damping_ratio=args.xi,
            angular_frequency=args.omega,
            phase=args.phase,
            dt=args.dt,
            n_samples=args.n,
            noise_sd=args.noise_sd,
            error=args.error,
        )
        telemetry = signals.synth_oscillator(spec, seed=seed)
    with pipeline_stage("export", path=str(args.output)):
        path = signals.save_csv(telemetry, args.output)

    duration = (spec.n_samples - 1) * spec.dt
    envelope_end = abs(spec.amplitude) * math.exp(
        -spec.damping_ratio * spec.angular_frequency * duration
    )
    _summary(
        "Synthetic oscillator",
        [
            ("file", path),
            ("samples", spec.n_samples),
            ("channels", ", ".join(telemetry.channel_names)),
            ("duration_s", _fmt(duration)),
            ("envelope", f"{_fmt(abs(spec.amplitude))} -> {_fmt(envelope_end)}"),
            ("error", _fmt(spec.channel_error)),
            ("seed", seed),
        ],
    )
    return EXIT_OK


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key=value run configuration file")
    parser.add_argument("--input", type=Path, help="Telemetry CSV")
    parser.add_argument("--dt", type=float, help="Sampling interval, seconds")
    parser.add_argument("--errors", help="Measurement error per channel, e.g. x:0.1,v:0.6")
    parser.add_argument("--default-error", type=float, help="Error for unlisted channels")
    parser.add_argument("--axes", help="Delay-space axes, e.g. x,v,x_lag5")
    parser.add_argument("--lags", help="Lagged channels, e.g. x:5,x:10")
    parser.add_argument("--r0", type=float, help="Squared-distance exclusion radius")
    parser.add_argument("--k", type=float, help="Neighbor factor")
    parser.add_argument("--alpha", type=float, help="Fuzzy kernel offset")
    parser.add_argument("--scheme", choices=[s.value for s in MarkovScheme])
    parser.add_argument("--cell-size", type=float, help="Grid cell edge, error units")
    parser.add_argument("--stride", type=int, help="Samples per transition step")
    parser.add_argument("--forecast-stride", type=int, help="Samples per forecast model step")
    parser.add_argument("--percentile", type=float, help="Robust-maximum percentile")
    parser.add_argument("--adequacy-threshold", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output-dir", type=Path)


def _run_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    overrides: Dict[str, Any] = {
        "input": args.input,
        "dt": args.dt,
        "errors": args.errors,
        "default_error": args.default_error,
        "axes": args.axes,
        "lags": args.lags,
        "r0": args.r0,
        "k": args.k,
        "alpha": args.alpha,
        "scheme": args.scheme,
        "cell_size": args.cell_size,
        "stride": args.stride,
        "forecast_stride": args.forecast_stride,
        "dimension_percentile": args.percentile,
        "adequacy_threshold": args.adequacy_threshold,
        "seed": args.seed,
        "output_dir": args.output_dir,
    }
    with pipeline_stage("ingest", config=str(args.config) if args.config else None):
        return load_run_config(args.config, overrides, settings)


def cmd_fit(args: argparse.Namespace, settings: Settings) -> int:
    """Fit a model and write model.json, fit_report.json and characteristic_points.csv.

    With a forecast stride different from the stride, the refit forecasting model
    goes to forecast_model.json.
    """
    config = _run_config(args, settings)
    pipeline = ReconstructionPipeline(config, settings)
    outcome = pipeline.run()
    report = outcome.report
    tracker = pipeline.forecast_model(outcome)

    out = config.output_dir
    with pipeline.stage("export", output_dir=str(out)):
        model_path = save_model(outcome.model, out / "model.json")
        out.mkdir(parents=True, exist_ok=True)
        (out / "fit_report.json").write_text(report.model_dump_json(indent=2), encoding="utf-8")
        write_point_table(outcome.model.states, out / "characteristic_points.csv")
        if tracker is not outcome.model:
            save_model(tracker, out / "forecast_model.json")

    _summary(
        "Markov model fit",
        [
            ("model", model_path),
            ("scheme", report.scheme.value),
            ("samples", report.n_samples),
            ("characteristic_points", report.n_points),
            ("robust_max_neighbors", report.robust_max_neighbors),
            ("dimension_estimate", report.dimension_estimate),
            ("adequacy_fraction", _fmt(report.adequacy_fraction, 4)),
            ("information_estimate_nats", _fmt(report.information_estimate)),
            ("grid_cells_per_axis", report.cells_per_axis),
            ("occupied_cells", report.occupied_cells),
            ("seed", report.seed),
        ],
    )
    if not report.adequate:
        print(
            f"warning: under-trained model, adequacy {report.adequacy_fraction:.4f} "
            f"< {config.adequacy_threshold}",
            file=sys.stderr,
        )
        return EXIT_WARNING
    return EXIT_OK


def cmd_dimension(args: argparse.Namespace, settings: Settings) -> int:
    """Characteristic points, neighbor counts, dimension and adequacy without a fit."""
    config = _run_config(args, settings)
    pipeline = ReconstructionPipeline(config, settings)
    _, _, series = pipeline.prepare()
    point_set = pipeline.select(series)
    fraction, adequate = states.adequacy(point_set, config.adequacy_threshold)

    out = config.output_dir
    with pipeline.stage("export", output_dir=str(out)):
        path = write_point_table(point_set, out / "characteristic_points.csv")

    counts = point_set.neighbor_counts
    _summary(
        "Dimension analysis",
        [
            ("points", path),
            ("characteristic_points", point_set.size),
            ("neighbor_count_range", f"[{int(counts.min())}, {int(counts.max())}]"),
            ("dimension_estimate", point_set.dimension_estimate),
            ("adequacy_fraction", _fmt(fraction, 4)),
        ],
    )
    if not adequate:
        print(
            f"warning: under-trained model, adequacy {fraction:.4f} < {config.adequacy_threshold}",
            file=sys.stderr,
        )
        return EXIT_WARNING
    return EXIT_OK


def cmd_info(args: argparse.Namespace, settings: Settings) -> int:
    """Information estimate and grid statistics of the embedded telemetry."""
    config = _run_config(args, settings)
    pipeline = ReconstructionPipeline(config, settings)
    telemetry, _, series = pipeline.prepare()
    with pipeline.stage("embed", cell_size=config.cell_size):
        measured = pipeline.source_channels(telemetry)
        information = embedding.information_estimate(telemetry, measured)
        cells = embedding.cells_per_axis(series, config.cell_size)
        occupied = embedding.occupied_cells(series, config.cell_size)

    rows: List[tuple] = [
        ("samples", telemetry.length),
        ("axes", ", ".join(series.axis_names)),
        ("information_estimate_nats", _fmt(information)),
    ]
    for channel in (telemetry.channel(name) for name in measured):
        rows.append((f"  {channel.name}", _fmt(math.log(channel.max_abs / channel.error))))
    rows += [("grid_cells_per_axis", cells), ("occupied_cells", occupied)]
    _summary("Information estimate", rows)
    return EXIT_OK


def cmd_modal(args: argparse.Namespace, settings: Settings) -> int:
    """Eigen table, eigenform table and a summary of attractors, periods and damping."""
    with pipeline_stage("ingest", model=str(args.model)):
        model = load_model(args.model)
    attractor_tol = settings.attractor_tol if args.attractor_tol is None else args.attractor_tol
    real_tol = settings.real_tol if args.real_tol is None else args.real_tol
    with pipeline_stage("modal", n_states=model.size):
        result = modal.decompose(model, attractor_tol=attractor_tol, real_tol=real_tol)
        n_real = modal.real_eigenvalue_count(result, real_tol)

    out = args.output_dir
    modes = list(range(min(args.modes, result.size)))
    with pipeline_stage("export", output_dir=str(out)):
        eigen_path = write_eigen_table(result, out / "eigenvalues.csv")
        forms_path = write_eigenform_table(result, model.states, out / "eigenforms.csv", modes)

    rows: List[tuple] = [
        ("eigenvalues", eigen_path),
        ("eigenforms", forms_path),
        ("states", result.size),
        ("attractor_count", result.attractor_count),
        ("real_eigenvalues", n_real),
        ("condition_number", _fmt(result.condition_number)),
    ]
    oscillatory = [row for row in modal.mode_table(result) if row["period_s"] is not None]
    for row in oscillatory[:5]:
        rows.append(
            (
                f"  mode {row['mode']}",
                f"|λ|={_fmt(row['modulus'])} T={_fmt(row['period_s'])} s "
                f"f={_fmt(row['frequency_hz'])} Hz ξ={_fmt(row['damping'])}",
            )
        )
    _summary("Modal analysis", rows)
    return EXIT_OK


def _held_out_series(model: MarkovModel, path: Path) -> Any:
    """Embed a held-out telemetry file with the model's recipe."""
    recipe = model.recipe
    if recipe is None:
        raise ValueError("model has no embedding recipe; start the forecast from --p0")
    lagged = {lag.channel_name: lag.source_channel for lag in recipe.lags}
    errors = {lagged.get(axis, axis): err for axis, err in zip(recipe.axes, recipe.errors)}
    telemetry = signals.load_csv(
        path,
        dt=model.dt / model.stride,
        errors=errors,
        # channels outside the recipe are loaded but never embedded
        default_error=min(recipe.errors),
    )
    telemetry = signals.add_lag_channels(telemetry, recipe.lags)
    return embedding.embed(telemetry, recipe.spec)


def cmd_forecast(args: argparse.Namespace, settings: Settings) -> int:
    """Write per-step distributions and, from a held-out sample, the trajectory comparison."""
    with pipeline_stage("ingest", model=str(args.model)):
        model = load_model(args.model)

    series = None
    with pipeline_stage("embed", source="p0" if args.p0 is not None else "sample"):
        if args.p0 is not None:
            p0 = StateDistribution.point_mass(model.size, args.p0)
        else:
            series = _held_out_series(model, args.from_sample)
            if not 0 <= args.sample_index < series.length:
                raise ValueError(
                    f"sample index {args.sample_index} out of range [0, {series.length})"
                )
            p0 = markov.initial_distribution(model, series.points[args.sample_index])

    sparsify: Any = "auto"
    if args.config is not None:
        with pipeline_stage("ingest", config=str(args.config)):
            sparsify = load_run_config(args.config, settings=settings).sparsify_count
    if args.no_sparsify:
        sparsify = None
    elif args.sparsify is not None:
        sparsify = args.sparsify
    with pipeline_stage("forecast", steps=args.steps, sparsify=str(sparsify)):
        distributions = markov.forecast(model, p0, args.steps, sparsify=sparsify)

    out = args.output_dir
    rows: List[tuple] = []
    with pipeline_stage("export", output_dir=str(out)):
        rows.append(("forecast", write_forecast(distributions, model.size, out / "forecast.csv")))
        if series is not None:
            expected = markov.expected_coordinates(model, distributions)
            idx = args.sample_index + model.stride * np.arange(1, args.steps + 1)
            actual = series.points[idx[idx < series.length]]
            rows.append(
                (
                    "trajectory",
                    write_trajectory(
                        model.states.axis_names, expected, out / "trajectory.csv", actual
                    ),
                )
            )

    rows += [
        ("steps", args.steps),
        ("sparsify", "off" if sparsify is None else sparsify),
    ]
    if distributions:
        final = distributions[-1].probabilities
        top = np.argsort(-final, kind="stable")[:3]
        rows.append(("final_top_states", ", ".join(f"{i}:{final[i]:.4f}" for i in top)))
    _summary("Forecast", rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for every subcommand."""
    parser = _Parser(
        prog="markov-delay-space",
        description="Markov models of dynamical systems in a dimensionless delay space",
    )
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Override LOG_LEVEL",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="Write a damped-oscillator telemetry CSV")
    synth.add_argument("--A", type=float, default=1.0, help="Amplitude")
    synth.add_argument("--xi", type=float, default=0.02, help="Damping ratio, [0, 1)")
    synth.add_argument("--omega", type=float, default=2 * math.pi, help="Angular frequency")
    synth.add_argument("--phase", type=float, default=0.0)
    synth.add_argument("--dt", type=float, default=0.01)
    synth.add_argument("--n", type=int, default=5000, help="Number of samples")
    synth.add_argument("--noise-sd", type=float, default=0.0)
    synth.add_argument("--error", type=float, help="Channel error (default |A|/100)")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--output", type=Path, default=Path("output/telemetry.csv"))
    synth.set_defaults(handler=cmd_synth)

    for name, handler, help_text in (
        ("fit", cmd_fit, "Fit a Markov model"),
        ("dimension", cmd_dimension, "Characteristic points and dimension estimate"),
        ("info", cmd_info, "Information estimate and grid statistics"),
    ):
        command = sub.add_parser(name, help=help_text)
        _add_run_flags(command)
        command.set_defaults(handler=handler)

    modal_cmd = sub.add_parser("modal", help="Eigen analysis of a fitted model")
    modal_cmd.add_argument("model", type=Path)
    modal_cmd.add_argument("--modes", type=int, default=3, help="Eigenforms to export")
    modal_cmd.add_argument("--attractor-tol", type=float)
    modal_cmd.add_argument("--real-tol", type=float)
    modal_cmd.add_argument("--output-dir", type=Path, default=Path("output"))
    modal_cmd.set_defaults(handler=cmd_modal)

    fc = sub.add_parser("forecast", help="Propagate a distribution through a fitted model")
    fc.add_argument("model", type=Path)
    fc.add_argument("--config", type=Path, help="Run configuration supplying sparsify")
    start = fc.add_mutually_exclusive_group(required=True)
    start.add_argument("--p0", type=int, help="Start from the indicator of this state")
    start.add_argument("--from-sample", type=Path, help="Held-out telemetry CSV")
    fc.add_argument("--sample-index", type=int, default=0)
    fc.add_argument("--steps", type=int, default=100)
    trunc = fc.add_mutually_exclusive_group()
    trunc.add_argument(
        "--sparsify", type=int, help="Components kept per step, overriding --config (default N + 1)"
    )
    trunc.add_argument("--no-sparsify", action="store_true")
    fc.add_argument("--output-dir", type=Path, default=Path("output"))
    fc.set_defaults(handler=cmd_forecast)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand.

    Returns:
        0 on success, 1 on any error, 2 on success with an under-trained model
    """
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    configure_logging(args.log_level or settings.log_level)
    logger.debug("Command started", command=args.command)

    try:
        return args.handler(args, settings)
    except PipelineStageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
