"""Monte Carlo tail of a conditioned Weibull sum against its bound."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import click

from regspec.steps.common import emit, format_option, out_option, seed_option
from regspec.weights import (
    MIN_TAIL_TRIALS,
    TailBoundQuery,
    conditioned_tail_exact,
    mc_sum_tail,
    weibull_sum_bound,
)

_HEADER = (
    "alpha",
    "m",
    "b",
    "L",
    "C",
    "estimate",
    "lower",
    "upper",
    "hits",
    "trials",
    "bound",
    "exact",
)


@click.command()
@click.option(
    "--alpha",
    default=1.0,
    show_default=True,
    type=click.FloatRange(0, min_open=True),
)
@click.option("--m", required=True, type=click.IntRange(1), help="Number of summands.")
@click.option(
    "--b",
    required=True,
    type=click.FloatRange(1, min_open=True),
    help="Every summand has |Y|**alpha >= b.",
)
@click.option(
    "--L",
    "thresholds",
    required=True,
    multiple=True,
    type=float,
    help="Threshold of the sum; may appear many times.",
)
@click.option(
    "--C",
    "constant",
    default=1.0,
    show_default=True,
    type=click.FloatRange(1),
    help="Tail constant of the summands.",
)
@click.option(
    "--trials",
    default=100_000,
    show_default=True,
    type=click.IntRange(MIN_TAIL_TRIALS),
)
@seed_option
@out_option
@format_option
def tailbound(  # noqa: PLR0913,PLR0917
    alpha: float,
    m: int,
    b: float,
    thresholds: tuple[float, ...],
    constant: float,
    trials: int,
    seed: int,
    out: str,
    fmt: str,
) -> None:
    """Monte Carlo tail of a conditioned Weibull sum against its bound."""
    rows = []
    for threshold in thresholds:
        try:
            query = TailBoundQuery.create(m, threshold, b, constant)
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="--L") from e
        estimate = mc_sum_tail(alpha, m, threshold, b, trials, seed)
        exact = conditioned_tail_exact(threshold, b) if m == 1 else None
        rows.append(
            (
                alpha,
                m,
                b,
                threshold,
                constant,
                estimate.estimate,
                estimate.lower,
                estimate.upper,
                estimate.hits,
                estimate.trials,
                weibull_sum_bound(query),
                exact,
            )
        )
    emit(out, fmt, _HEADER, rows, {"seed": seed})
