"""Utility functions for regspec."""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import contextlib
import getpass
import logging
import os.path
import socket
import time
from concurrent import futures
from typing import TYPE_CHECKING, TypeVar

import coloredlogs
import psutil

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

_logger = logging.getLogger().getChild(__name__)

_T = TypeVar("_T")
_R = TypeVar("_R")


def default_workers(tasks: int | None = None) -> int:
    """Returns the worker count for trial pools.

    Physical cores are preferred; the result never exceeds `tasks` when given.
    """
    workers = psutil.cpu_count(logical=False) or 1
    if tasks is not None:
        workers = max(1, min(workers, tasks))
    return workers


def run_ordered(
    func: Callable[[_T], _R],
    tasks: Sequence[_T],
    threads: int | None = None,
) -> list[_R]:
    """Run `func` over `tasks` and return the results in task order.

    With one worker the tasks run inline in this process. Otherwise they are
    spread over a process pool; `Executor.map` yields in submission order, so
    the worker count never changes the result order.
    """
    workers = default_workers(len(tasks)) if threads is None else threads
    workers = max(1, min(workers, len(tasks) or 1))
    if workers == 1:
        return [func(task) for task in tasks]

    _logger.info("running %d tasks on %d workers", len(tasks), workers)
    with futures.ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, tasks))


def _log_file_name(program_name: str) -> str:
    """`<program>.<host>.<user>.log.INFO.<time>.<pid>`, glog style."""
    try:
        username = getpass.getuser()
    except KeyError:
        # No passwd entry, e.g. inside a container.
        username = str(os.getuid())
    time_str = time.strftime("%Y%m%d-%H%M%S", time.localtime())
    return ".".join(
        (
            program_name,
            socket.gethostname(),
            username,
            "log.INFO",
            time_str,
            str(os.getpid()),
        )
    )


class _RunLogHandler(logging.FileHandler):
    """The per-run DEBUG log; at most one is attached to the root logger."""


def setup_logging(
    verbose: int | None,
    quiet: int | None,
    work_dir: str,
    program_name: str = "regspec",
) -> str:
    """Colored terminal logs at the chosen level, and a DEBUG log file.

    The file is `<work_dir>/log/<program>...INFO...`, pointed at by the
    `<program>.INFO` symlink. Returns the file path.
    """
    level = ((quiet or 0) - (verbose or 0)) * 10 + logging.INFO
    level = max(logging.DEBUG, min(logging.CRITICAL, level))
    coloredlogs.install(
        level=level,
        fmt="%(levelname).1s%(asctime)s %(name)s:%(lineno)d] %(message)s",
        datefmt="%m%d %H:%M:%S.%f",
    )

    log_dir = os.path.join(work_dir, "log")
    os.makedirs(log_dir, exist_ok=True)
    filename = os.path.join(log_dir, _log_file_name(program_name))
    symlink = os.path.join(log_dir, f"{program_name}.INFO")
    # Another user may own the symlink.
    with contextlib.suppress(OSError):
        if os.path.islink(symlink):
            os.unlink(symlink)
        os.symlink(os.path.basename(filename), symlink)

    root = logging.getLogger()
    for stale in [h for h in root.handlers if isinstance(h, _RunLogHandler)]:
        root.removeHandler(stale)
        stale.close()
    handler = _RunLogHandler(filename, encoding="utf-8")
    handler.setFormatter(
        logging.Formatter(
            fmt="%(levelname).1s%(asctime)s.%(msecs)03d %(name)s:%(lineno)d] "
            "%(message)s",
            datefmt="%m%d %H:%M:%S",
        )
    )
    handler.setLevel(logging.DEBUG)
    root.addHandler(handler)
    _logger.debug("logging to %s at level %s", filename, logging.getLevelName(level))
    return filename
