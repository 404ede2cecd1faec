"""Top eigenpair of a weighted regular network."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import logging
import math

import click
import numpy as np

from regspec.experiments import PropertyViolationError
from regspec.spectral import (
    SparseSym,
    dense_eigs,
    lambda_max,
    max_entry_lower_bound,
    spectral_norm,
)
from regspec.steps.common import (
    emit,
    format_option,
    load_network,
    network_options,
    out_option,
)

_logger = logging.getLogger().getChild(__name__)

_HEADER = (
    "n",
    "d",
    "alpha",
    "lambda1",
    "residual",
    "converged",
    "iterations",
    "max_abs_weight",
    "ratio",
    "norm",
    "dense_lambda1",
)


@click.command()
@network_options
@click.option(
    "--tol",
    default=1e-10,
    show_default=True,
    type=click.FloatRange(0, min_open=True),
)
@click.option("--max-iter", default=5000, show_default=True, type=click.IntRange(1))
@click.option(
    "--norm", "with_norm", is_flag=True, help="Also compute the spectral norm."
)
@click.option(
    "--dense",
    is_flag=True,
    help="Cross-check against the dense Jacobi solver (n <= 512).",
)
@click.option(
    "--vector",
    metavar="FILE",
    type=click.Path(dir_okay=False),
    help="Write the eigenvector, one coordinate per line.",
)
@out_option
@format_option
def eigen(  # noqa: PLR0913,PLR0917
    input_file: str | None,
    n: int | None,
    d: int,
    alpha: float,
    unweighted: bool,
    seed: int,
    tol: float,
    max_iter: int,
    with_norm: bool,
    dense: bool,
    vector: str | None,
    out: str,
    fmt: str,
) -> None:
    """Top eigenpair of a weighted regular network."""
    network = load_network(input_file, n, d, alpha, seed, unweighted=unweighted)
    matrix = SparseSym.from_network(network)
    top = lambda_max(matrix, tol, max_iter)
    graph = network.graph
    largest = max_entry_lower_bound(matrix)
    norm = spectral_norm(matrix, tol, max_iter) if with_norm else None
    dense_value = float(dense_eigs(matrix).values[0]) if dense else None
    alpha = network.params.alpha
    row = (
        graph.n,
        graph.d,
        alpha,
        top.value,
        top.residual,
        top.converged,
        top.iterations,
        largest,
        top.value / math.log(graph.n) ** (1 / alpha),
        norm,
        dense_value,
    )
    if vector is not None:
        np.savetxt(vector, top.vector, fmt="%.17g")
        _logger.info("wrote eigenvector to `%s`", vector)
    source = {"input": input_file, "seed": None if input_file else seed}
    emit(out, fmt, _HEADER, [row], source)
    if top.value < largest - top.residual:
        msg = f"lambda1 {top.value!r} is below max|W| {largest!r} minus the residual"
        raise PropertyViolationError(msg)
