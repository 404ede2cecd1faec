"""Run an experiment suite from a config file."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import logging

import click

from regspec.experiments import load_config, run
from regspec.steps.common import summary_format_option, threads_option

_logger = logging.getLogger().getChild(__name__)


@click.command()
@click.option(
    "--config",
    "-c",
    "config_file",
    metavar="FILE",
    required=True,
    type=click.Path(dir_okay=False, exists=True),
    help="Experiment config, a JSON (or YAML) document.",
)
@click.option(
    "--out",
    "-o",
    metavar="PREFIX",
    type=click.Path(dir_okay=False),
    help="Artifact path prefix; overrides the config's `output`.",
)
@summary_format_option
@threads_option
def experiment(
    config_file: str,
    out: str | None,
    fmt: str,
    threads: int | None,
) -> None:
    """Run an experiment suite from a config file."""
    config = load_config(config_file)
    _logger.info("loaded %s experiment from `%s`", config.kind, config_file)
    result = run(config, out=out, threads=threads, summary_format=fmt)
    failed = [check.name for check in result.checks if not check.passed]
    if failed:
        _logger.warning("checks failed: %s", ", ".join(failed))
    click.echo(result.csv_path)
    click.echo(result.summary_path)
