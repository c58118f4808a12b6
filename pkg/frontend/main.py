"""
Command line for the connected-graph generator.

    python -m frontend.main enum --loops 1 --vertices 2 --legs 0 --format table
    python -m frontend.main eval --model phi3 --legs 2 --max-order 2
    python -m frontend.main check --suite weights --max-edges 5
    python -m frontend.main trees --vertices 2 --legs 4
    python -m frontend.main export --loops 1 --vertices 2 --legs 2 --output out.json

Results go to stdout; logs go to stderr. Exit codes: 0 success, 1 failed check,
2 bad flags or model, 3 resource guard.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional

import typer
from pydantic import ValidationError
from rich.logging import RichHandler

from backend.checks import run_suite
from backend.errors import OmegaError, ResourceGuardError
from backend.feynman import load_model, npoint_parts, recursive_parts
from backend.generator import OmegaGenerator
from backend.graph import GraphSum
from backend.oracle import zero_d_connected_oracle
from backend.settings import Settings, load_settings
from backend.tools.data_tools import dumps, json_lines, tool_export_graph_sum
from backend.tools.dot_tools import graph_sum_to_dot
from data.bundled import model_path
from frontend.render import graph_table, make_console, parts_table

logger = logging.getLogger("frontend")

EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2
EXIT_GUARD = 3

app = typer.Typer(add_completion=False, no_args_is_help=True, help="Generate and evaluate weighted connected graphs.")


class Format(str, Enum):
    table = "table"
    json = "json"
    dot = "dot"


class ExportFormat(str, Enum):
    json = "json"
    dot = "dot"


class Method(str, Enum):
    graphs = "graphs"
    recursion = "recursion"
    oracle = "oracle"


class OnePoint(str, Enum):
    keep = "keep"
    drop = "drop"


class Suite(str, Enum):
    weights = "weights"
    equivalence = "equivalence"
    completeness = "completeness"
    oracle = "oracle"
    trees = "trees"


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(name)s: %(message)s",
        handlers=[RichHandler(console=make_console(120, stderr=True), show_time=False, show_path=False)],
        force=True,
    )


def _fail(code: int, message: str) -> typer.Exit:
    typer.echo(f"error: {message}", err=True)
    return typer.Exit(code)


@contextmanager
def handle_errors() -> Iterator[None]:
    """Map library errors to exit codes."""
    try:
        yield
    except ResourceGuardError as exc:
        raise _fail(EXIT_GUARD, str(exc)) from exc
    except OmegaError as exc:
        raise _fail(EXIT_USAGE, str(exc)) from exc


def _settings(ctx: typer.Context) -> Settings:
    return ctx.obj


def _generator(settings: Settings, species: int = 1) -> OmegaGenerator:
    return OmegaGenerator.from_settings(settings, species_count=species)


def _emit(s: GraphSum, fmt: Format, title: str, unordered: bool, settings: Settings) -> None:
    if fmt is Format.json:
        for line in json_lines(s, with_symmetry=unordered):
            typer.echo(line)
    elif fmt is Format.dot:
        typer.echo(graph_sum_to_dot(s), nl=False)
    else:
        make_console(settings.console_width).print(graph_table(s, title, unordered))


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", exists=True, dir_okay=False, help="TOML file with settings."),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR."),
    workers: Optional[int] = typer.Option(None, "--workers", min=1, help="Processes for the recursion summands."),
) -> None:
    try:
        settings = load_settings(config, log_level=log_level, workers=workers)
    except ValidationError as exc:
        raise _fail(EXIT_USAGE, f"invalid settings: {exc}") from exc
    configure_logging(settings.log_level)
    logger.debug("settings: %s", settings.model_dump())
    ctx.obj = settings


@app.command("enum")
def cmd_enum(
    ctx: typer.Context,
    loops: int = typer.Option(..., "--loops", min=0),
    vertices: int = typer.Option(..., "--vertices", min=1),
    legs: int = typer.Option(0, "--legs", min=0),
    ordered: bool = typer.Option(False, "--ordered", help="Keep the vertex order (no forgetting)."),
    species: int = typer.Option(1, "--species", min=1),
    fmt: Format = typer.Option(Format.json, "--format"),
) -> None:
    """Print the weighted connected graphs with the given loops, vertices and legs."""
    settings = _settings(ctx)
    with handle_errors(), _generator(settings, species) as gen:
        labels = list(range(1, legs + 1))
        s = gen.omega(loops, vertices, labels) if ordered else gen.enumerate_connected(loops, vertices, labels)
        _emit(s, fmt, f"Omega^{{{loops},{vertices}}} with {legs} legs", not ordered, settings)


@app.command("eval")
def cmd_eval(
    ctx: typer.Context,
    model: str = typer.Option(..., "--model", help="Bundled model name (phi3, phi4) or TOML file."),
    legs: int = typer.Option(..., "--legs", min=0),
    max_order: int = typer.Option(..., "--max-order", min=0),
    per_loop: bool = typer.Option(False, "--per-loop", help="Show each sigma^{l,v} separately."),
    method: Method = typer.Option(Method.graphs, "--method"),
    one_point: Optional[OnePoint] = typer.Option(None, "--one-point", help="Override the model's 1-point convention."),
) -> None:
    """Print the connected n-point function coefficients by coupling order."""
    settings = _settings(ctx)
    console = make_console(settings.console_width)
    with handle_errors():
        field_model = load_model(model_path(model), max_order)
    if one_point is not None:
        field_model = field_model.model_copy(update={"one_point": one_point.value})
    with handle_errors(), _generator(settings, len(field_model.species)) as gen:
        labels = list(range(1, legs + 1))
        if method is Method.oracle:
            if per_loop:
                raise _fail(EXIT_USAGE, "--per-loop is not available with --method oracle")
            value = zero_d_connected_oracle(field_model, legs, source_shift=field_model.one_point == "drop")
            for row in value.table():
                typer.echo(row)
            return
        if method is Method.recursion:
            parts = recursive_parts(field_model, legs)
        else:
            parts = npoint_parts(field_model, labels, generator=gen)
        if per_loop:
            console.print(parts_table(parts, f"{field_model.name}: G_c^({legs}) by (l, v)"))
            return
        total = field_model.ring.zero()
        for value in parts.values():
            total = total + value
        for row in total.table():
            typer.echo(row)


@app.command("check")
def cmd_check(
    ctx: typer.Context,
    suite: Suite = typer.Option(..., "--suite"),
    max_edges: int = typer.Option(4, "--max-edges", min=0),
    max_legs: int = typer.Option(2, "--max-legs", min=0),
    max_order: int = typer.Option(3, "--max-order", min=0, help="Coupling order for the oracle suite."),
) -> None:
    """Run a property suite; exit 1 with a smallest counterexample on failure."""
    settings = _settings(ctx)
    with handle_errors(), _generator(settings) as gen:
        result = run_suite(suite.value, gen, max_edges=max_edges, max_legs=max_legs, max_order=max_order)
    typer.echo(dumps(result))
    if not result["ok"]:
        raise typer.Exit(EXIT_FAILED_CHECK)


@app.command("trees")
def cmd_trees(
    ctx: typer.Context,
    vertices: int = typer.Option(..., "--vertices", min=1),
    legs: int = typer.Option(0, "--legs", min=0),
    modified: bool = typer.Option(False, "--modified", help="Minimal valence 3 instead of 2."),
    fmt: Format = typer.Option(Format.table, "--format"),
) -> None:
    """List the trees of Omega^{0,V} with minimal valence 2 (or 3); each must have weight 1."""
    settings = _settings(ctx)
    with handle_errors(), _generator(settings) as gen:
        trees = gen.trees(vertices, list(range(1, legs + 1)), min_degree=3 if modified else 2)
    _emit(trees, fmt, f"trees with {vertices} vertices and {legs} legs", True, settings)
    if any(w != 1 for _, w in trees):
        raise typer.Exit(EXIT_FAILED_CHECK)


@app.command("export")
def cmd_export(
    ctx: typer.Context,
    loops: int = typer.Option(..., "--loops", min=0),
    vertices: int = typer.Option(..., "--vertices", min=1),
    legs: int = typer.Option(0, "--legs", min=0),
    ordered: bool = typer.Option(False, "--ordered"),
    species: int = typer.Option(1, "--species", min=1),
    fmt: ExportFormat = typer.Option(ExportFormat.json, "--format"),
    output: Path = typer.Option(..., "--output", help="Destination file, written atomically."),
) -> None:
    """Write a graph sum as a JSON document or DOT file."""
    settings = _settings(ctx)
    with handle_errors(), _generator(settings, species) as gen:
        labels = list(range(1, legs + 1))
        s = gen.omega(loops, vertices, labels) if ordered else gen.enumerate_connected(loops, vertices, labels)
        result = tool_export_graph_sum(str(output), s, fmt.value, title="G")
    typer.echo(dumps(result))


if __name__ == "__main__":
    app()
