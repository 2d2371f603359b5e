"""
ellipcert command line.

Subcommands: gen, annotate, check, bounds, simulate.

Exit codes:
    0  certified (or, for gen/bounds, success)
    1  refuted: the analysis ran and the certificate does not hold
    2  operational error: bad input, unstable system, I/O failure
"""

from __future__ import annotations

import functools
import json
import uuid
from collections.abc import Callable
from pathlib import Path
from typing import Any, ParamSpec

import click
from pydantic import BaseModel

from ellipcert import __version__
from ellipcert.annotation.annotator import annotate
from ellipcert.cli.reporting import (
    render_annotation,
    render_bounds,
    render_soundness,
    render_verdict,
)
from ellipcert.config.settings import ReportFormat, Settings, load_settings
from ellipcert.program.io import load_matrix, load_program, save_program
from ellipcert.program.ir import canonical_program
from ellipcert.shared.documents import load_certificate, save_certificate
from ellipcert.shared.exceptions import EllipCertError, InvalidInputError
from ellipcert.shared.logger import bind_run_context, clear_run_context, get_logger
from ellipcert.shared.schema import AnnotatorOptions, to_rows
from ellipcert.simulation.soundness import monte_carlo_soundness
from ellipcert.verification.bounds import certificate_bounds
from ellipcert.verification.checker import check_certificate

logger = get_logger("ellipcert.cli")

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_ERROR = 2

P = ParamSpec("P")

_existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)
_output_file = click.Path(dir_okay=False, writable=True, path_type=Path)
_format_choice = click.Choice([f.value for f in ReportFormat])
_positive = click.FloatRange(min=0.0, min_open=True)


def exit_codes(func: Callable[P, int]) -> Callable[P, None]:
    """Run a subcommand body and turn its result or error into an exit code."""

    @functools.wraps(func)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> None:
        ctx = click.get_current_context()
        bind_run_context(uuid.uuid4().hex[:12], command=ctx.info_name)
        try:
            code = func(*args, **kwargs)
        except (EllipCertError, OSError) as exc:
            logger.error(
                "command_failed", error=str(exc), error_type=type(exc).__name__
            )
            click.echo(f"error: {exc}", err=True)
            code = EXIT_ERROR
        except Exception as exc:
            logger.exception("command_crashed", error_type=type(exc).__name__)
            click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
            code = EXIT_ERROR
        finally:
            clear_run_context()
        ctx.exit(code)

    return wrapper


def _settings() -> Settings:
    settings = click.get_current_context().find_object(Settings)
    return settings if settings is not None else load_settings()


def _emit(
    fmt: str | None, text: Callable[[], str], model: BaseModel | dict[str, Any]
) -> None:
    chosen = fmt or _settings().report.format
    if chosen == ReportFormat.JSON:
        if isinstance(model, BaseModel):
            model = model.model_dump(mode="json")
        click.echo(json.dumps(model, indent=2))
    else:
        click.echo(text())


def parse_box(text: str | None, n: int) -> list[float] | None:
    """
    ``--init-box`` value: one number for every variable or exactly n numbers.

    Raises:
        InvalidInputError: unparsable number or wrong count
    """
    if text is None:
        return None
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InvalidInputError(
            f"--init-box must be numbers: {exc}", field="init_box"
        ) from exc
    if len(values) == 1:
        values = values * n
    if len(values) != n:
        raise InvalidInputError(
            f"--init-box needs 1 or {n} values, got {len(values)}", field="init_box"
        )
    return values


@click.group()
@click.option(
    "--config",
    "config_path",
    type=_existing_file,
    default=None,
    help="Settings YAML (defaults to the bundled defaults.yaml).",
)
@click.version_option(version=__version__, prog_name="ellipcert")
@click.pass_context
def cli(ctx: click.Context, config_path: Path | None) -> None:
    """Certify boundedness of linear control loops with ellipsoidal invariants."""
    try:
        ctx.obj = load_settings(config_path)
    except EllipCertError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_ERROR)


@cli.command()
@click.option(
    "--input",
    "input_path",
    type=_existing_file,
    required=True,
    help='JSON state matrix A (array of rows, or {"A": ...}).',
)
@click.option(
    "--init-box",
    default=None,
    help="Bounds on |x_i|: one value for all, or a comma-separated list.",
)
@click.option(
    "--output",
    "output_path",
    type=_output_file,
    required=True,
    help="Program file to write.",
)
@exit_codes
def gen(input_path: Path, init_box: str | None, output_path: Path) -> int:
    """Generate the canonical loop program for x_{k+1} = A x_k."""
    a = load_matrix(input_path)
    program = canonical_program(a, parse_box(init_box, a.shape[0]))
    save_program(output_path, program)
    click.echo(
        f"wrote {len(program.body)} instructions (n = {program.n}) to {output_path}"
    )
    return EXIT_OK


@cli.command("annotate")
@click.option("--input", "input_path", type=_existing_file, required=True)
@click.option(
    "--output",
    "output_path",
    type=_output_file,
    required=True,
    help="Certificate file to write.",
)
@click.option(
    "--safety-factor",
    type=click.FloatRange(min=1.0),
    default=None,
    help="Multiplier on the smallest admissible loop-head scale (>= 1).",
)
@click.option("--tol", type=_positive, default=None, help="Relative PSD tolerance.")
@click.option(
    "--q",
    "q_path",
    type=_existing_file,
    default=None,
    help="JSON matrix Q for the Lyapunov equation (default identity).",
)
@click.option("--format", "fmt", type=_format_choice, default=None)
@click.option(
    "--matrices", is_flag=True, default=False, help="Also print every matrix."
)
@exit_codes
def annotate_cmd(
    input_path: Path,
    output_path: Path,
    safety_factor: float | None,
    tol: float | None,
    q_path: Path | None,
    fmt: str | None,
    matrices: bool,
) -> int:
    """Annotate a program with invariants and write its certificate."""
    settings = _settings()
    program = load_program(input_path)
    opts = AnnotatorOptions(
        q=to_rows(load_matrix(q_path)) if q_path else None,
        safety_factor=safety_factor or settings.annotator.safety_factor,
        tol=tol or settings.annotator.tol,
    )
    cert = annotate(program, opts)
    save_certificate(output_path, cert)
    digits = settings.report.significant_digits
    summary = cert.model_dump(
        mode="json",
        include={
            "n",
            "alpha",
            "sigma_max",
            "closure_ok",
            "closure_margin",
            "init_box_ok",
            "init_box_margin",
        },
    )
    summary["certified"] = cert.certified
    _emit(fmt, lambda: render_annotation(program, cert, digits, matrices), summary)
    return EXIT_OK if cert.certified else EXIT_REFUTED


@cli.command()
@click.option("--input", "input_path", type=_existing_file, required=True)
@click.option("--certificate", "cert_path", type=_existing_file, required=True)
@click.option("--tol", type=_positive, default=None, help="Relative PSD tolerance.")
@click.option("--format", "fmt", type=_format_choice, default=None)
@exit_codes
def check(input_path: Path, cert_path: Path, tol: float | None, fmt: str | None) -> int:
    """Independently verify a certificate, obligation by obligation."""
    settings = _settings()
    program = load_program(input_path)
    cert = load_certificate(cert_path)
    verdict = check_certificate(program, cert, tol or settings.checker.tol)
    digits = settings.report.significant_digits
    _emit(fmt, lambda: render_verdict(verdict, digits), verdict)
    return EXIT_OK if verdict.certified else EXIT_REFUTED


@cli.command()
@click.option("--input", "cert_path", type=_existing_file, required=True)
@click.option("--format", "fmt", type=_format_choice, default=None)
@exit_codes
def bounds(cert_path: Path, fmt: str | None) -> int:
    """Per-variable bounds and the bounding ball of a certificate."""
    digits = _settings().report.significant_digits
    report = certificate_bounds(load_certificate(cert_path))
    _emit(fmt, lambda: render_bounds(report, digits), report)
    return EXIT_OK


@cli.command()
@click.option("--input", "input_path", type=_existing_file, required=True)
@click.option("--certificate", "cert_path", type=_existing_file, required=True)
@click.option(
    "--trials",
    type=click.IntRange(min=0),
    default=None,
    help="Uniform samples (corners and axis points are added).",
)
@click.option(
    "--cycles",
    type=click.IntRange(min=0),
    default=None,
    help="Loop iterations per sample.",
)
@click.option("--seed", type=int, default=None)
@click.option(
    "--tol", type=_positive, default=None, help="Relative membership tolerance."
)
@click.option("--format", "fmt", type=_format_choice, default=None)
@exit_codes
def simulate(
    input_path: Path,
    cert_path: Path,
    trials: int | None,
    cycles: int | None,
    seed: int | None,
    tol: float | None,
    fmt: str | None,
) -> int:
    """Run the program on sampled initial states and check every invariant."""
    settings = _settings()
    sim = settings.simulation
    program = load_program(input_path)
    cert = load_certificate(cert_path)
    report = monte_carlo_soundness(
        program,
        cert,
        trials=sim.trials if trials is None else trials,
        cycles=sim.cycles if cycles is None else cycles,
        seed=sim.seed if seed is None else seed,
        tol=tol or sim.tol,
        max_corner_dim=sim.max_corner_dim,
    )
    digits = settings.report.significant_digits
    _emit(fmt, lambda: render_soundness(report, digits), report)
    return EXIT_OK if report.sound else EXIT_REFUTED


def main() -> None:
    """Console entry point."""
    cli(prog_name="ellipcert")
