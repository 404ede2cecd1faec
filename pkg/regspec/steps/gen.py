"""Sample a uniform random regular graph, optionally with Weibull weights."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import logging

import click

from regspec.decomposition import network_for_trial
from regspec.regular_graph import (
    census,
    default_census_radius,
    generate_regular,
    write_graph,
)
from regspec.rng import derive_seed
from regspec.steps.common import seed_option
from regspec.weights import write_network

_logger = logging.getLogger().getChild(__name__)


@click.command()
@click.option("--n", required=True, type=click.IntRange(2), help="Number of vertices.")
@click.option("--d", default=3, show_default=True, type=click.IntRange(1))
@click.option(
    "--alpha",
    type=click.FloatRange(0, min_open=True),
    help="Attach Weibull weights of this shape.",
)
@seed_option
@click.option(
    "--out",
    "-o",
    metavar="FILE",
    required=True,
    type=click.Path(dir_okay=False),
    help="Graph file, or network file when --alpha is given.",
)
@click.option(
    "--census",
    "with_census",
    is_flag=True,
    help="Log the cycle census of the default-radius balls.",
)
def gen(  # noqa: PLR0913,PLR0917
    n: int,
    d: int,
    alpha: float | None,
    seed: int,
    out: str,
    with_census: bool,
) -> None:
    """Sample a uniform random regular graph, optionally with Weibull weights."""
    if alpha is None:
        graph = generate_regular(n, d, derive_seed(seed, 0))
        write_graph(out, graph)
    else:
        network = network_for_trial(n, d, alpha, seed)
        graph = network.graph
        write_network(out, network)
    _logger.info(
        "wrote %d-regular graph on %d vertices to `%s` after %d pairings",
        d,
        n,
        out,
        graph.attempts,
    )
    if with_census:
        result = census(graph, default_census_radius(n, d))
        _logger.info(
            "radius %d: max excess %d, %d cyclic vertices (cap %d)",
            result.radius,
            result.max_excess,
            result.cyclic_vertex_count,
            result.cyclic_cap,
        )
