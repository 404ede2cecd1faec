"""Print regspec version to standard output."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import sys

import click

from regspec import __version__


@click.command()
def version() -> None:
    """Print regspec version to standard output."""
    sys.stdout.write(__version__)
