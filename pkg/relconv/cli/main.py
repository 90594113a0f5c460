"""
Command-line interface for relconv.

This module provides the 'relconv' command for checking relational
groupoids, verifying the reduction chain and computing convolutions and
norms from JSON definition files.
"""

import json
import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, NoReturn, Optional

import click

from relconv import __version__
from relconv.core.convolution import AlgebraElement, check_associativity, convolve, reduce_algebra
from relconv.core.exceptions import (
    DefinitionError,
    ReductionError,
    RelConvError,
)
from relconv.core.haar import RelationalHaarSystem
from relconv.core.reduction import quotient_groupoid
from relconv.core.representation import reduced_norm
from relconv.core.scalars import format_fraction, parts
from relconv.core.settings import configure
from relconv.generators.corpus import export_corpus
from relconv.parser.definition import Definition, load_definition
from relconv.report.report import Report, ReportFormat
from relconv.runner.theorems import check_report, describe_reduction, verify
from relconv.utils.logger import Log

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_INTERRUPTED = 130

FORMAT_OPTION = click.option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in ReportFormat]),
    default=ReportFormat.TEXT.value,
    show_default=True,
    help="Report format.",
)
FILE_ARGUMENT = click.argument("definition_file", type=click.Path(dir_okay=False), metavar="<file>")


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    """
    Configure logging for the CLI.

    Args:
        verbose: Enable verbose/debug logging
        quiet: Suppress all non-error output
    """
    if quiet:
        level = logging.ERROR
    elif verbose:
        level = logging.DEBUG
    else:
        level = logging.INFO

    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr)


def describe_error(e: RelConvError) -> str:
    """One-line message; definition errors are prefixed with file:line:column."""
    if isinstance(e, DefinitionError):
        where = [str(part) for part in (e.file_path, e.line_no, e.column_no) if part is not None]
        if where:
            return f"{':'.join(where)}: {e.message}"
    witness = e.context.get("witness")
    if witness:
        return f"{e.message} (witness {','.join(str(w) for w in witness)})"
    return e.message


@contextmanager
def cli_errors(ctx: click.Context) -> Iterator[None]:
    """Map library errors to exit code 2 and interrupts to 130."""
    verbose = ctx.obj.get("verbose", False) if ctx.obj else False
    try:
        yield
    except RelConvError as e:
        click.secho(f"Error: {describe_error(e)}", fg="red", err=True)
        if verbose:
            logger.exception("Command failed")
        sys.exit(EXIT_INPUT)
    except KeyboardInterrupt:
        click.secho("Interrupted", fg="yellow", err=True)
        sys.exit(EXIT_INTERRUPTED)


def _load(path: str) -> Definition:
    if not Path(path).exists():
        raise DefinitionError("file not found", file_path=path)
    return load_definition(path)


def _require_haar(defn: Definition, command: str) -> RelationalHaarSystem:
    if defn.haar is None:
        raise DefinitionError(f"{command} needs a haar section", file_path=defn.path)
    return defn.haar


def _emit(ctx: click.Context, report: Report, output_format: str) -> NoReturn:
    click.echo(report.render(ReportFormat(output_format), ctx.obj.get("color", False)))
    sys.exit(EXIT_OK if report.passed else EXIT_FAILED)


def _element_json(f: AlgebraElement) -> dict[str, list[str]]:
    return {f.carrier.label(p): [format_fraction(x) for x in parts(z)] for p, z in f.items()}


def _echo_json(data: Any) -> None:
    click.echo(json.dumps(data, indent=2, ensure_ascii=False))


@click.group(invoke_without_command=True)
@click.option("-v", "--version", is_flag=True, help="Show version and exit.")
@click.option("--verbose", is_flag=True, help="Enable verbose output.")
@click.option("--quiet", is_flag=True, help="Suppress non-error output.")
@click.option("--trace", type=click.IntRange(min=0), default=0, metavar="LEVEL", help="Show trace segments up to LEVEL.")
@click.option("--max-carrier", type=click.IntRange(min=1), default=None, metavar="N", help="Largest accepted carrier.")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Threads for the checks.")
@click.option("--color/--no-color", default=None, help="Color PASS/FAIL (default: when stdout is a terminal).")
@click.pass_context
def cli(
    ctx: click.Context,
    version: bool,
    verbose: bool,
    quiet: bool,
    trace: int,
    max_carrier: Optional[int],
    threads: Optional[int],
    color: Optional[bool],
) -> None:
    """
    relconv - relational groupoids, Haar systems and convolution algebras.

    Every command reads a JSON definition file. Results go to stdout,
    messages go to stderr.

    \b
    Examples:
        relconv check z4z2.json
        relconv verify --format json z4z2-strong.json
        relconv convolve --f d0 --g d0 z4z2-strong.json
        relconv norm --f d0 z2-half.json
        relconv corpus ./corpus

    \b
    Exit Codes:
        0: All checks passed
        1: A check failed
        2: Invalid input
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["quiet"] = quiet
    ctx.obj["color"] = sys.stdout.isatty() if color is None else color

    setup_logging(verbose=verbose, quiet=quiet)
    Log.set_level(trace)

    if version:
        click.echo(f"relconv version {__version__}")
        ctx.exit(0)

    changes: dict[str, int] = {}
    if max_carrier is not None:
        changes["max_carrier_size"] = max_carrier
    if threads is not None:
        changes["threads"] = threads
    if changes:
        configure(**changes)

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        ctx.exit(0)


@cli.command()
@FILE_ARGUMENT
@FORMAT_OPTION
@click.pass_context
def check(ctx: click.Context, definition_file: str, output_format: str) -> None:
    """
    Check the relational groupoid axioms.

    Prints one line per axiom; a failing axiom shows its witness.
    """
    with cli_errors(ctx):
        defn = _load(definition_file)
        report = check_report(defn.groupoid, definition_file)
    _emit(ctx, report, output_format)


@cli.command(name="verify")
@FILE_ARGUMENT
@FORMAT_OPTION
@click.pass_context
def verify_command(ctx: click.Context, definition_file: str, output_format: str) -> None:
    """
    Run the whole verification chain.

    Axioms, quotient groupoid, fiber properties, Haar conditions,
    classifiers, associativity, the convolution lemma, the vanishing
    ideal and the reduction theorem. Non-associativity of a system that
    is not strongly split is reported as expected and does not fail the run.
    """
    with cli_errors(ctx):
        defn = _load(definition_file)
        report = verify(defn.groupoid, _require_haar(defn, "verify"), definition_file)
    _emit(ctx, report, output_format)


@cli.command()
@FILE_ARGUMENT
@FORMAT_OPTION
@click.pass_context
def reduce(ctx: click.Context, definition_file: str, output_format: str) -> None:
    """
    Print the quotient groupoid of the constraint set.

    With a haar section the induced Haar system ν is printed as well.
    """
    with cli_errors(ctx):
        defn = _load(definition_file)
        axioms = check_report(defn.groupoid, definition_file)
        if not axioms.passed:
            _emit(ctx, axioms, output_format)
        try:
            qd = quotient_groupoid(defn.groupoid.checked())
        except ReductionError as e:
            click.secho(f"Error: {describe_error(e)}", fg="red", err=True)
            sys.exit(EXIT_FAILED)
        data = describe_reduction(defn.groupoid, qd, defn.haar)

    if output_format == ReportFormat.JSON.value:
        _echo_json({"command": "reduce", "file": definition_file, **data})
        sys.exit(EXIT_OK)
    click.echo(f"constraint set: {', '.join(data['constraint_set'])}")
    for cls, members in data["classes"].items():
        click.echo(f"class {cls}: {', '.join(members)}")
    click.echo(f"objects: {', '.join(data['objects'])}")
    for m in data["classes"]:
        click.echo(f"{m}: {data['source'][m]} -> {data['target'][m]}")
    for a, b, c in data["products"]:
        click.echo(f"{a} * {b} = {c}")
    for obj, weights in data.get("nu", {}).items():
        shown = ", ".join(f"{m}: {w}" for m, w in weights.items())
        click.echo(f"nu({obj}): {shown or '0'}")
    sys.exit(EXIT_OK)


@cli.command(name="convolve")
@FILE_ARGUMENT
@click.option("--f", "f_name", required=True, metavar="NAME", help="Left factor.")
@click.option("--g", "g_name", required=True, metavar="NAME", help="Right factor.")
@FORMAT_OPTION
@click.pass_context
def convolve_command(ctx: click.Context, definition_file: str, f_name: str, g_name: str, output_format: str) -> None:
    """
    Print f⋆g with exact coefficients.

    Only nonzero entries are printed; the zero function prints as 0.
    """
    with cli_errors(ctx):
        defn = _load(definition_file)
        haar = _require_haar(defn, "convolve")
        result = convolve(defn.groupoid, haar, defn.function(f_name), defn.function(g_name))

    if output_format == ReportFormat.JSON.value:
        _echo_json({"command": "convolve", "file": definition_file, "f": f_name, "g": g_name,
                    "result": _element_json(result)})
    else:
        click.echo(result.format())
    sys.exit(EXIT_OK)


@cli.command()
@FILE_ARGUMENT
@FORMAT_OPTION
@click.pass_context
def assoc(ctx: click.Context, definition_file: str, output_format: str) -> None:
    """
    Scan every basis triple for associativity of the convolution.

    Exits with 1 and prints the first failing triple when it does not associate.
    """
    with cli_errors(ctx):
        defn = _load(definition_file)
        haar = _require_haar(defn, "assoc")
        report = Report("assoc", definition_file)
        report.add_check(check_associativity(defn.groupoid, haar), "convolution")
    _emit(ctx, report, output_format)


@cli.command()
@FILE_ARGUMENT
@click.option("--f", "f_name", required=True, metavar="NAME", help="An L2-invariant function.")
@FORMAT_OPTION
@click.pass_context
def norm(ctx: click.Context, definition_file: str, f_name: str, output_format: str) -> None:
    """
    Print the reduced C*-norm of an L2-invariant function.

    The function is carried to the quotient groupoid and the norm is
    taken over the left regular representations of ν.
    """
    with cli_errors(ctx):
        defn = _load(definition_file)
        haar = _require_haar(defn, "norm")
        reduced = reduce_algebra(defn.groupoid.checked(), haar)
        image = reduced.phi(defn.function(f_name))
        value = reduced_norm(reduced.quotient.quotient, reduced.nu, image)

    if output_format == ReportFormat.JSON.value:
        _echo_json({"command": "norm", "file": definition_file, "f": f_name, "norm": value})
    else:
        click.echo(f"{value:.12g}")
    sys.exit(EXIT_OK)


@cli.command()
@click.argument("output_dir", type=click.Path(file_okay=False), metavar="<outdir>")
@click.option("--negative/--no-negative", default=True, show_default=True, help="Include failing examples.")
@click.pass_context
def corpus(ctx: click.Context, output_dir: str, negative: bool) -> None:
    """
    Write the built-in examples as definition files.
    """
    with cli_errors(ctx):
        written = export_corpus(output_dir, negative=negative)
    if not ctx.obj.get("quiet", False):
        for path in written:
            click.echo(str(path), err=True)
        click.secho(f"✓ Wrote {len(written)} definition files", fg="green", err=True)
    sys.exit(EXIT_OK)


def main() -> None:
    """Entry point for the console script."""
    cli()


if __name__ == "__main__":
    main()
