"""Command-line front end."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional

import typer

from . import __version__
from .errors import ModelValidationError, SnakeError
from .exponents import parse_exp
from .ingest import build_linkmodel, cross_validate, load_germ, numeric_tord
from .linkmodel import require_valid, validate
from .models import LinkModel
from .pizza import multipizza, pizza_decomposition
from .report import (
    analysis_report,
    analysis_text,
    cross_validation_report,
    estimates_report,
    link_dot,
    multipizza_report,
    oracle_text,
    pizza_report,
    pizza_text,
    surgery_report,
    surgery_text,
    validation_text,
)
from .settings import settings
from .snk import format_snk, load_snk
from .surgery import SurgeryKind, SurgerySpec, perform
from .util import dump_json, safe_write_text

log = logging.getLogger(__name__)

app = typer.Typer(add_completion=False, help="Outer Lipschitz invariants of surface germs from link models.")


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    DOT = "dot"


@dataclass
class ReportConfig:
    format: OutputFormat
    out: Optional[Path]
    tolerance: float


@contextmanager
def _reported() -> Iterator[None]:
    try:
        yield
    except ModelValidationError as e:
        typer.echo(f"error: {e}", err=True)
        for v in e.violations[1:]:
            typer.echo(f"  {v}", err=True)
        raise typer.Exit(code=e.exit_code) from None
    except SnakeError as e:
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(code=e.exit_code) from None


def _emit(cfg: ReportConfig, text: str) -> None:
    if cfg.out is not None:
        safe_write_text(cfg.out, text)
        log.info("wrote %s", cfg.out)
    else:
        typer.echo(text, nl=False)


def _load(path: Path) -> LinkModel:
    if path.suffix == ".germ":
        return build_linkmodel(load_germ(path))
    return load_snk(path)


def _version(value: bool) -> None:
    if value:
        typer.echo(f"lipsnakes {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    fmt: Optional[OutputFormat] = typer.Option(None, "--format", help="text, json or dot"),
    out: Optional[Path] = typer.Option(None, "--out", help="write the report here instead of stdout"),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="numeric agreement tolerance"),
    version: bool = typer.Option(False, "--version", callback=_version, is_eager=True),
) -> None:
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    log.debug("env=%s", settings.ENV)
    ctx.obj = ReportConfig(
        format=fmt or OutputFormat(settings.DEFAULT_FORMAT),
        out=out,
        tolerance=settings.TOLERANCE if tolerance is None else tolerance,
    )


@app.command()
def analyze(ctx: typer.Context, path: Path = typer.Argument(..., exists=True, dir_okay=False, help=".snk model or .germ surface")) -> None:
    """Class, segments, nodal zones, multiplicities and nodes of a model."""
    cfg: ReportConfig = ctx.obj
    with _reported():
        model = _load(path)
        require_valid(model)
        if cfg.format == OutputFormat.DOT:
            _emit(cfg, link_dot(model))
            return
        report = analysis_report(model)
        _emit(cfg, dump_json(report) if cfg.format == OutputFormat.JSON else analysis_text(report))


@app.command()
def render(ctx: typer.Context, path: Path = typer.Argument(..., exists=True, dir_okay=False, help=".snk model or .germ surface")) -> None:
    """DOT diagram of the link with contact clusters shaded."""
    with _reported():
        _emit(ctx.obj, link_dot(_load(path)))


@app.command()
def pizza(
    ctx: typer.Context,
    path: Path = typer.Argument(..., exists=True, dir_okay=False, help=".snk model or .germ surface"),
    pancake: str = typer.Option(..., "--pancake", help="pancake X_j carrying the pizza"),
    target: Optional[str] = typer.Option(None, "--target", help="pancake X_k of f_k; all of them when omitted"),
) -> None:
    """Minimal pizza of f_k on X_j, or the multipizza of X_j."""
    cfg: ReportConfig = ctx.obj
    with _reported():
        model = _load(path)
        require_valid(model)
        if target is None:
            report = multipizza_report(multipizza(model, pancake))
        else:
            report = pizza_report(pizza_decomposition(model, pancake, target))
        _emit(cfg, dump_json(report) if cfg.format == OutputFormat.JSON else pizza_text(report))


@app.command()
def surgery(
    ctx: typer.Context,
    path: Path = typer.Argument(..., exists=True, dir_okay=False, help=".snk model or .germ surface"),
    remove_segment: Optional[int] = typer.Option(None, "--remove-segment", help="build X(k)"),
    cut_nodal: Optional[int] = typer.Option(None, "--cut-nodal", help="build X_{alpha,k}"),
    alpha: Optional[str] = typer.Option(None, "--alpha", help="exponent of the removed triangle"),
) -> None:
    """Remove a segment or cut a nodal zone, and decide whether the result is a snake."""
    cfg: ReportConfig = ctx.obj
    if (remove_segment is None) == (cut_nodal is None):
        typer.echo("error: give exactly one of --remove-segment and --cut-nodal", err=True)
        raise typer.Exit(code=2)
    with _reported():
        model = _load(path)
        require_valid(model)
        if remove_segment is not None:
            spec = SurgerySpec(SurgeryKind.REMOVE_SEGMENT, remove_segment)
        else:
            if alpha is None:
                typer.echo("error: --cut-nodal needs --alpha", err=True)
                raise typer.Exit(code=2)
            spec = SurgerySpec(SurgeryKind.CUT_NODAL, cut_nodal, parse_exp(alpha))
        outcome = perform(model, spec)
        _emit(cfg, dump_json(surgery_report(outcome)) if cfg.format == OutputFormat.JSON else surgery_text(outcome))


@app.command()
def ingest(
    path: Path = typer.Argument(..., exists=True, dir_okay=False, help=".germ surface"),
    output: Optional[Path] = typer.Option(None, "-o", "--output", help=".snk file to write"),
) -> None:
    """Build a .snk model from a .germ surface."""
    with _reported():
        model = build_linkmodel(load_germ(path))
        require_valid(model)
        text = format_snk(model)
        if output is None:
            typer.echo(text, nl=False)
        else:
            safe_write_text(output, text)
            log.info("wrote %s (%s)", output, model.describe())


@app.command()
def oracle(
    ctx: typer.Context,
    path: Path = typer.Argument(..., exists=True, dir_okay=False, help=".germ surface"),
    pair: Optional[str] = typer.Option(None, "--pair", help="two arc names, a,b"),
) -> None:
    """Numeric tangency orders; without --pair, cross-validate every marked-arc pair."""
    cfg: ReportConfig = ctx.obj
    with _reported():
        surface = load_germ(path)
        if pair is not None:
            names = [p.strip() for p in pair.split(",")]
            if len(names) != 2:
                typer.echo("error: --pair takes two arc names separated by a comma", err=True)
                raise typer.Exit(code=2)
            report = estimates_report([numeric_tord(surface, names[0], names[1])])
        else:
            result = cross_validate(surface, build_linkmodel(surface), tolerance=cfg.tolerance)
            report = cross_validation_report(result)
        _emit(cfg, dump_json(report) if cfg.format == OutputFormat.JSON else oracle_text(report))
        if report["ok"] is False:
            raise typer.Exit(code=1)


@app.command("validate")
def validate_cmd(ctx: typer.Context, path: Path = typer.Argument(..., exists=True, dir_okay=False, help=".snk model or .germ surface")) -> None:
    """Check a .snk model or .germ surface and list every violation."""
    cfg: ReportConfig = ctx.obj
    with _reported():
        report = validate(_load(path))
        if cfg.format == OutputFormat.JSON:
            _emit(cfg, dump_json(report.model_dump()))
        else:
            _emit(cfg, validation_text(report.violations))
        if not report.ok:
            raise typer.Exit(code=2)
