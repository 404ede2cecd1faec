"""Maximize the tree variational problem over a range of depths."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import functools
import logging

import click

from regspec.steps.common import (
    emit_with_summary,
    out_option,
    seed_option,
    summary_format_option,
    threads_option,
)
from regspec.util import run_ordered
from regspec.variational import gamma_from_alpha, h_d, solve_kdl

_logger = logging.getLogger().getChild(__name__)

_HEADER = ("d", "L", "gamma", "alpha", "value", "converged", "restarts")


@click.command()
@click.option("--d", default=3, show_default=True, type=click.IntRange(3))
@click.option(
    "--L-max",
    "depth",
    default=5,
    show_default=True,
    type=click.IntRange(1),
    help="Solve every depth from 1 to this one.",
)
@click.option(
    "--gamma",
    type=click.FloatRange(0.5),
    help="Exponent of the edge form.",
)
@click.option(
    "--alpha",
    type=click.FloatRange(1, min_open=True),
    help="Weight shape; solves at gamma = beta/2 and reports h(d, alpha).",
)
@click.option("--restarts", default=16, show_default=True, type=click.IntRange(1))
@click.option(
    "--step-rule",
    default="bb",
    show_default=True,
    type=click.Choice(("bb", "armijo")),
)
@click.option(
    "--mode",
    default="auto",
    show_default=True,
    type=click.Choice(("auto", "full", "reduced")),
)
@click.option(
    "--tol",
    default=1e-10,
    show_default=True,
    type=click.FloatRange(0, min_open=True),
)
@click.option("--max-iter", default=5000, show_default=True, type=click.IntRange(1))
@seed_option
@out_option
@summary_format_option
@threads_option
def variational(  # noqa: PLR0913,PLR0917
    d: int,
    depth: int,
    gamma: float | None,
    alpha: float | None,
    restarts: int,
    step_rule: str,
    mode: str,
    tol: float,
    max_iter: int,
    seed: int,
    out: str,
    fmt: str,
    threads: int | None,
) -> None:
    """Maximize the tree variational problem over a range of depths.

    With --gamma the depths are independent and run on --threads workers.
    With --alpha each depth warm-starts from the previous one, in order.
    """
    if (gamma is None) == (alpha is None):
        msg = "give exactly one of --gamma and --alpha"
        raise click.UsageError(msg)

    document: dict = {"d": d}
    rows = []
    if alpha is not None:
        result = h_d(
            d,
            alpha,
            L_max=depth,
            restarts=restarts,
            tol=tol,
            max_iter=max_iter,
            seed=seed,
        )
        gamma = gamma_from_alpha(alpha)
        document.update(alpha=alpha, h=result.value, ceiling=result.ceiling)
        rows = [
            (d, row.L, gamma, alpha, row.kdl, row.converged, restarts)
            for row in result.table
        ]
        if not rows:
            _logger.info("h(d=%d, alpha=%g) = 1 for alpha <= 2", d, alpha)
    else:
        solve = functools.partial(
            solve_kdl,
            d,
            gamma=gamma,
            restarts=restarts,
            step_rule=step_rule,
            tol=tol,
            mode=mode,
            max_iter=max_iter,
            seed=seed,
        )
        solutions = run_ordered(solve, range(1, depth + 1), threads)
        rows = [
            (d, s.L, gamma, None, s.value, s.converged, restarts) for s in solutions
        ]
        document.update(gamma=gamma, value=max(s.value for s in solutions))
    document["sequence"] = [row[4] for row in rows]
    document["converged"] = all(row[5] for row in rows)
    emit_with_summary(out, fmt, _HEADER, rows, document)
