"""The main entry point for regspec."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import logging

import click

from regspec import __version__
from regspec.experiments import ConfigError
from regspec.steps.decompose import decompose
from regspec.steps.eigen import eigen
from regspec.steps.experiment import experiment
from regspec.steps.gen import gen
from regspec.steps.tailbound import tailbound
from regspec.steps.variational import variational
from regspec.steps.version import version
from regspec.util import setup_logging

_logger = logging.getLogger().getChild(__name__)

RUNTIME_ERROR_EXIT_CODE = 3


class _EntryPoint(click.Group):
    """Maps config errors to usage errors and other failures to exit code 3."""

    def invoke(self, ctx: click.Context) -> object:
        try:
            return super().invoke(ctx)
        except ConfigError as e:
            raise click.UsageError(str(e), ctx) from e
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except Exception:  # noqa: BLE001
            _logger.exception("regspec failed")
            ctx.exit(RUNTIME_ERROR_EXIT_CODE)


@click.group(cls=_EntryPoint)
@click.option(
    "--verbose",
    "-v",
    default=0,
    count=True,
    help="Increase logging verbosity.",
)
@click.option(
    "--quiet",
    "-q",
    default=0,
    count=True,
    help="Decrease logging verbosity.",
)
@click.option(
    "--work-dir",
    "-w",
    metavar="DIR",
    default="./work.out/",
    type=click.Path(file_okay=False),
    help="Specify working directory; logs go to its `log` subdirectory.",
)
@click.version_option(__version__, prog_name="regspec")
def entry_point(
    verbose: int,
    quiet: int,
    work_dir: str,
) -> None:
    """Extremal spectra of weighted random regular graphs."""
    setup_logging(verbose, quiet, work_dir)

    _logger.info("regspec version: %s", __version__)


entry_point.add_command(gen)
entry_point.add_command(eigen)
entry_point.add_command(variational)
entry_point.add_command(decompose)
entry_point.add_command(tailbound)
entry_point.add_command(experiment)
entry_point.add_command(version)


def main() -> None:
    entry_point(prog_name="regspec")


if __name__ == "__main__":
    main()
