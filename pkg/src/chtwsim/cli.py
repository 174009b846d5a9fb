"""
Command-line front end.

Exit codes: 0 success, 1 model errors (syntax, references, validation,
missing brane/step), 2 I/O errors, 3 strict run hit NEGATIVE_RESOURCE.
Diagnostics go to standard error as JSON lines.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Iterable, Optional

import click
from loguru import logger

from .config import Settings, get_settings
from .dsl.parser import parse_file
from .errors import CHTWError, ModelParseError, NegativeResourceError, UnvalidatedSystemError
from .models.diagnostics import Diagnostic
from .models.trace import RunOptions
from .services.catalog import ScenarioCatalog
from .services.classifier import classify_system
from .services.compiler import CompiledSystem, compile_system
from .services.dynamics import Simulator
from .services.matrix_view import export_matrices
from .services.reporting import (
    SUMMARY_FILE,
    TRACE_FILE,
    PlotDataError,
    build_summary,
    plot_rows,
    write_summary,
    write_trace_csv,
)
from .services.validator import validate_system

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_IO = 2
EXIT_NEGATIVE = 3


def configure_logging(settings: Settings) -> None:
    logger.remove()
    logger.add(sys.stderr, level=settings.log_level.upper(), serialize=True)
    if settings.log_file is not None:
        logger.add(settings.log_file, rotation="10 MB", retention="7 days", level="INFO")
    logger.enable("chtwsim")


def emit(diagnostics: Iterable[Diagnostic]) -> None:
    for diagnostic in diagnostics:
        click.echo(json.dumps(diagnostic.to_json_dict()), err=True)


def emit_io_error(path: Path | str, error: Exception) -> None:
    payload = {"severity": "error", "code": "IO_ERROR", "message": f"{path}: {error}"}
    click.echo(json.dumps(payload), err=True)


def _load(ctx: click.Context, model_path: str) -> CompiledSystem:
    """Parse and validate, or exit with the matching code."""
    try:
        document = parse_file(model_path)
    except ModelParseError as e:
        emit(e.diagnostics)
        ctx.exit(EXIT_MODEL)
    except (OSError, UnicodeDecodeError) as e:
        emit_io_error(model_path, e)
        ctx.exit(EXIT_IO)

    try:
        compiled = compile_system(document.system)
    except UnvalidatedSystemError as e:
        emit(validate_system(document.system))
        logger.debug("Model {} rejected: {}", model_path, e.message)
        ctx.exit(EXIT_MODEL)
    emit(compiled.diagnostics.warnings)
    return compiled


def _write_json(payload: object, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")


@click.group()
@click.pass_context
def cli(ctx: click.Context):
    """chtwsim - simulate CHTW-systems (spatially distributed Petri nets)"""
    settings = get_settings()
    configure_logging(settings)
    ctx.obj = settings


@cli.command()
@click.argument("model_path")
@click.pass_context
def validate(ctx: click.Context, model_path: str):
    """Parse and validate a model"""
    compiled = _load(ctx, model_path)
    click.echo(json.dumps({"model": model_path, "errors": [], "warnings": len(compiled.diagnostics.warnings)}))


@cli.command()
@click.argument("model_path")
@click.option("--steps", "-n", type=click.IntRange(min=0), default=None, help="Number of steps")
@click.option("--strict/--no-strict", default=None, help="Abort with exit 3 on negative resource")
@click.option("--sample-every", "-k", type=click.IntRange(min=1), default=None, help="Record states every K steps")
@click.option("--out", "-o", "out_dir", default=None, help="Output directory")
@click.pass_context
def run(
    ctx: click.Context,
    model_path: str,
    steps: Optional[int],
    strict: Optional[bool],
    sample_every: Optional[int],
    out_dir: Optional[str],
):
    """Run a model and write trace.csv and summary.json"""
    settings: Settings = ctx.obj
    output_dir = Path(out_dir) if out_dir is not None else settings.output_dir
    options = RunOptions(
        steps=settings.default_steps if steps is None else steps,
        strict=settings.strict if strict is None else strict,
        sample_every=settings.sample_every if sample_every is None else sample_every,
        output_dir=output_dir,
    )
    compiled = _load(ctx, model_path)

    aborted = False
    try:
        trace = Simulator(compiled).run(options.steps, options)
    except NegativeResourceError as e:
        trace, aborted = e.trace, True

    digits = settings.significant_digits
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        write_trace_csv(output_dir / TRACE_FILE, trace, compiled, digits)
        summary = build_summary(trace, compiled, digits, model=model_path, aborted=aborted)
        write_summary(output_dir / SUMMARY_FILE, summary)
    except OSError as e:
        emit_io_error(output_dir, e)
        ctx.exit(EXIT_IO)

    emit(trace.diagnostics)
    ctx.exit(EXIT_NEGATIVE if aborted else EXIT_OK)


@cli.command()
@click.argument("model_path")
@click.option("--out", "-o", default=None, help="Output file (default: stdout)")
@click.option("--step", "-k", type=click.IntRange(min=0), default=0, help="Step at which R_s and W are taken")
@click.pass_context
def matrices(ctx: click.Context, model_path: str, out: Optional[str], step: int):
    """Export S_H, S_W, R_s, W and W^T as JSON"""
    compiled = _load(ctx, model_path)
    try:
        _write_json(export_matrices(compiled, step), out)
    except OSError as e:
        emit_io_error(out or "", e)
        ctx.exit(EXIT_IO)


@cli.command()
@click.argument("trace_path")
@click.option("--brane", "-b", required=True, help="C-brane id")
@click.option("--step", "-k", type=click.IntRange(min=0), required=True, help="Recorded step")
@click.option("--out", "-o", default=None, help="Output file (default: stdout)")
@click.pass_context
def plotdata(ctx: click.Context, trace_path: str, brane: str, step: int, out: Optional[str]):
    """Write cell-center coordinates and values of one brane at one step"""
    settings: Settings = ctx.obj
    try:
        lines = plot_rows(Path(trace_path), brane, step, settings.significant_digits)
        text = "\n".join(lines) + "\n"
        if out is None:
            click.echo(text, nl=False)
        else:
            Path(out).write_text(text, encoding="utf-8")
    except PlotDataError as e:
        click.echo(json.dumps(e.to_dict()), err=True)
        ctx.exit(EXIT_MODEL)
    except (OSError, ValueError, KeyError) as e:
        emit_io_error(trace_path, e)
        ctx.exit(EXIT_IO)


@cli.command()
@click.argument("model_path")
@click.pass_context
def classify(ctx: click.Context, model_path: str):
    """Classify a model (homogeneity, topology, stationarity, ...)"""
    compiled = _load(ctx, model_path)
    _write_json(classify_system(compiled.system).model_dump(mode="json"), None)


@cli.command()
@click.option("--path", "scenarios_path", default=None, help="Scenario directory")
@click.pass_context
def scenarios(ctx: click.Context, scenarios_path: Optional[str]):
    """List bundled scenarios"""
    catalog = ScenarioCatalog(scenarios_path)
    for name in catalog.list_scenarios():
        scenario = catalog.get_scenario(name)
        if scenario is not None:
            click.echo(f"{scenario.name}\t{catalog.model_path(name)}\t{scenario.description}")


def main() -> None:
    try:
        cli()
    except CHTWError as e:
        click.echo(json.dumps(e.to_dict()), err=True)
        sys.exit(EXIT_MODEL)


if __name__ == "__main__":
    main()
