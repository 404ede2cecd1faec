"""Split a network at a truncation level and locate its top eigenvector."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import logging

import click

from regspec.decomposition import (
    DecompositionParams,
    component_stats,
    decompose as split,
    exact_checks,
    isolated_mass,
    localization_report,
)
from regspec.experiments import PropertyViolationError
from regspec.spectral import SparseSym, lambda_max
from regspec.steps.common import (
    emit_with_summary,
    load_network,
    network_options,
    out_option,
    summary_format_option,
)

_logger = logging.getLogger().getChild(__name__)

_HEADER = (
    "component",
    "vertices",
    "edges",
    "excess",
    "S",
    "x",
    "F",
    "M",
    "rayleigh",
    "certificate",
)


@click.command()
@network_options
@click.option(
    "--b",
    type=click.FloatRange(0, min_open=True),
    help="Truncation level; edges with |W|**alpha > b are heavy.",
)
@click.option(
    "--schedule",
    is_flag=True,
    help="Take b from the log n schedule instead of --b.",
)
@click.option(
    "--kappa",
    default=0.05,
    show_default=True,
    type=click.FloatRange(0, min_open=True),
)
@click.option(
    "--eps",
    default=0.1,
    show_default=True,
    type=click.FloatRange(0, 1, min_open=True, max_open=True),
    help="Support threshold of the localization report.",
)
@out_option
@summary_format_option
def decompose(  # noqa: PLR0913,PLR0917
    input_file: str | None,
    n: int | None,
    d: int,
    alpha: float,
    unweighted: bool,
    seed: int,
    b: float | None,
    schedule: bool,
    kappa: float,
    eps: float,
    out: str,
    fmt: str,
) -> None:
    """Split a network at a truncation level and locate its top eigenvector."""
    if (b is None) == (not schedule):
        msg = "give exactly one of --b and --schedule"
        raise click.UsageError(msg)
    network = load_network(input_file, n, d, alpha, seed, unweighted=unweighted)
    alpha = network.params.alpha
    if schedule:
        params = DecompositionParams.from_schedule(network.graph.n, alpha, kappa)
    else:
        params = DecompositionParams.create(alpha, b)
    decomposition = split(network, params)
    top = lambda_max(SparseSym.from_network(network))
    stats = component_stats(network, decomposition, top.vector)
    largest = stats[0].S if stats else 0.0
    report = localization_report(
        network,
        top.vector,
        eps,
        stats=stats,
        heavy_threshold=(1 - eps) * largest if stats else None,
    )
    checks = exact_checks(decomposition, top)

    document = {
        "n": network.graph.n,
        "d": network.graph.d,
        "alpha": alpha,
        "b": params.b,
        "threshold": params.threshold,
        "lambda1": top.value,
        "heavy_edges": int(decomposition.heavy.sum()),
        "components": len(stats),
        "excess_edges": int(decomposition.excess.sum()),
        "isolated_mass": isolated_mass(decomposition, top.vector),
        "localization": {
            "eps": eps,
            "min_support_size": report.min_support_size,
            "top_edge_mass": report.top_edge_mass,
            "disjoint_edges": len(report.disjoint_edges),
            "disjoint_mass": report.disjoint_mass,
            "heavy_component_count": report.heavy_component_count,
            "participation": report.participation,
        },
        "checks": [
            {"name": c.name, "passed": bool(c.passed), "detail": c.detail}
            for c in checks
        ],
    }
    if params.a is not None:
        document.update(a=params.a, a_tilde=params.a_tilde)
    rows = [
        (
            row.component,
            row.vertex_count,
            row.edge_count,
            row.excess,
            row.S,
            row.x,
            row.F,
            row.M,
            row.rayleigh,
            row.certificate,
        )
        for row in stats
    ]
    emit_with_summary(out, fmt, _HEADER, rows, document)
    failed = [check.name for check in checks if not check.passed]
    if failed:
        msg = f"exact checks failed: {', '.join(failed)}"
        raise PropertyViolationError(msg)
