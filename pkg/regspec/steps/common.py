"""Options and output helpers shared by the regspec subcommands."""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import csv
import logging
from collections.abc import Mapping
from typing import TYPE_CHECKING, Any

import click

from regspec.decomposition import network_for_trial
from regspec.experiments import SUMMARY_FORMATS, format_cell, write_summary
from regspec.regular_graph import read_graph
from regspec.weights import WeightedNetwork, read_network

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

_logger = logging.getLogger().getChild(__name__)

FORMATS = ("csv", "json", "yaml")

seed_option = click.option(
    "--seed",
    default=0,
    type=click.IntRange(0, 2**64 - 1),
    show_default=True,
    help="Master seed; every random stream is derived from it.",
)
out_option = click.option(
    "--out",
    "-o",
    metavar="FILE",
    default="-",
    type=click.Path(dir_okay=False, allow_dash=True),
    help="Output file, `-` for standard output.",
)
format_option = click.option(
    "--format",
    "fmt",
    default="csv",
    type=click.Choice(FORMATS),
    show_default=True,
    help="Table as CSV, or the full result as a JSON or YAML document.",
)
threads_option = click.option(
    "--threads",
    "-j",
    default=None,
    type=click.IntRange(1),
    help="Worker processes; defaults to the number of physical cores.",
)
summary_format_option = click.option(
    "--format",
    "fmt",
    default="json",
    show_default=True,
    type=click.Choice(SUMMARY_FORMATS),
    help="Summary document format.",
)


def network_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """--input, or --n --d --alpha to sample a network from --seed."""
    for option in reversed(
        (
            click.option(
                "--input",
                "-i",
                "input_file",
                metavar="FILE",
                type=click.Path(dir_okay=False, exists=True),
                help="Network file written by `regspec gen --alpha`.",
            ),
            click.option("--n", type=click.IntRange(2), help="Number of vertices."),
            click.option("--d", type=click.IntRange(1), default=3, show_default=True),
            click.option(
                "--alpha",
                type=click.FloatRange(0, min_open=True),
                default=1.0,
                show_default=True,
                help="Weibull shape of the edge weights.",
            ),
            click.option(
                "--unweighted",
                is_flag=True,
                help="Replace every weight with 1.",
            ),
            seed_option,
        )
    ):
        func = option(func)
    return func


def load_network(  # noqa: PLR0913
    input_file: str | None,
    n: int | None,
    d: int,
    alpha: float,
    seed: int,
    *,
    unweighted: bool = False,
) -> WeightedNetwork:
    """Read a network, or sample one; a plain graph file gets unit weights."""
    if input_file is not None:
        _logger.info("reading network from `%s`", input_file)
        with open(input_file, encoding="utf-8") as fp:
            fields = len(fp.readline().split())
        if fields == 3:  # noqa: PLR2004
            network = WeightedNetwork.unit(read_graph(input_file), alpha)
        else:
            network = read_network(input_file)
    elif n is None:
        msg = "either --input or --n is required"
        raise click.UsageError(msg)
    else:
        network = network_for_trial(n, d, alpha, seed)
    if unweighted:
        network = WeightedNetwork.unit(network.graph, network.params.alpha)
    return network


def write_table(
    out: str, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> None:
    with click.open_file(out, "w", encoding="utf-8") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([format_cell(value) for value in row] for row in rows)


def write_document(out: str, document: Mapping[str, Any], fmt: str) -> None:
    with click.open_file(out, "w", encoding="utf-8") as fp:
        write_summary(fp, document, fmt)


def emit(
    out: str,
    fmt: str,
    header: Sequence[str],
    rows: Sequence[Sequence[object]],
    document: Mapping[str, Any],
) -> None:
    """Write the rows as CSV, or the document with the rows under `rows`."""
    if fmt == "csv":
        write_table(out, header, rows)
        return
    records = [
        {name: plain(value) for name, value in zip(header, row, strict=True)}
        for row in rows
    ]
    write_document(out, {**document, "rows": records}, fmt)


def emit_with_summary(
    out: str,
    fmt: str,
    header: Sequence[str],
    rows: Sequence[Sequence[object]],
    summary: Mapping[str, Any],
) -> str | None:
    """Write the rows as CSV to `out` and the summary next to it.

    The summary goes to `<out>.summary.<fmt>`, or to standard error when the
    table goes to standard output. Returns the summary path, if any.
    """
    write_table(out, header, rows)
    summary = plain(summary)
    if out == "-":
        write_summary(click.get_text_stream("stderr"), summary, fmt)
        return None
    path = f"{out}.summary.{fmt}"
    write_document(path, summary, fmt)
    _logger.info("wrote %s and %s", out, path)
    return path


def plain(value: Any) -> Any:  # noqa: ANN401
    """Python scalars for numpy scalars, for JSON and YAML dumps."""
    if isinstance(value, Mapping):
        return {key: plain(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [plain(item) for item in value]
    if hasattr(value, "item") and not hasattr(value, "__len__"):
        return value.item()
    return value
