"""Seeded experiment suites with CSV records and summary documents.

An experiment config names a kind, a parameter grid, a trial count and a
master seed. Every (grid point, trial) pair becomes one task whose seed is
`trial_seed(master_seed, grid_index, trial_index)`; tasks run on a process
pool and their records are written in task order, so the output files depend
only on the config.
"""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import csv
import itertools
import json
import logging
import math
import os
from collections.abc import Mapping
from typing import IO, TYPE_CHECKING, Any, NamedTuple

import numpy as np
import yaml

from regspec.decomposition import (
    Check,
    DecompositionParams,
    ShatteringRecord,
    ShatteringTask,
    TransitionRecord,
    TransitionTask,
    component_stats,
    decompose,
    exact_checks,
    isolated_mass,
    lln_center,
    localization_report,
    network_for_trial,
    shattering_trial,
    shattering_union_bound,
    transition_trial,
)
from regspec.regular_graph import census, default_census_radius, generate_regular
from regspec.rng import derive_seed, trial_seed
from regspec.spectral import SparseSym, lambda_max
from regspec.util import run_ordered
from regspec.variational import (
    gamma_from_alpha,
    kd_closed_form,
    kdl_half_bounds,
    solve_kdl,
    star_bound,
)
from regspec.weights import (
    MIN_TAIL_TRIALS,
    TailBoundQuery,
    WeightedNetwork,
    conditioned_tail_exact,
    mc_sum_tail,
    weibull_sum_bound,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

_logger = logging.getLogger().getChild(__name__)

SCHEMA_VERSION = 1
KINDS = (
    "lln",
    "transition",
    "localization",
    "shattering",
    "census",
    "tailbound",
    "variational",
)
SUMMARY_FORMATS = ("json", "yaml")

_TOP_KEYS = (
    "kind",
    "description",
    "grid",
    "trials",
    "master_seed",
    "output",
    "solver",
    "options",
)
# Required and optional grid axes; tasks enumerate the product in this order.
_AXES: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "lln": (("d", "n", "alpha"), ()),
    "transition": (("d", "n", "alpha"), ()),
    "localization": (("d", "n", "alpha", "eps"), ()),
    "shattering": (("d", "n"), ("b",)),
    "census": (("d", "n"), ("radius",)),
    "tailbound": (("alpha", "m", "b", "L_offset"), ("C",)),
    "variational": (("d", "L"), ("gamma", "alpha")),
}
_SOLVER_KEYS = {
    "tol": float,
    "max_iter": int,
    "restarts": int,
    "step_rule": str,
    "mode": str,
    "center_depth": int,
}
_OPTION_KEYS = {
    "with_norm": bool,
    "unweighted": bool,
    "b_schedule": str,
    "kappa": float,
}
_B_SCHEDULES = ("log_n_over_3",)
_STEP_RULES = ("bb", "armijo")
_SOLVER_MODES = ("auto", "full", "reduced")

_DEFAULT_TOL = 1e-10
_DEFAULT_MAX_ITER = 5000
_DEFAULT_RESTARTS = 16
_DEFAULT_CENTER_DEPTH = 10
_DEFAULT_KAPPA = 0.05

_Z_95 = 1.96
_EXCEEDANCE_MARGIN = 0.05
_CLOSED_FORM_TOL = 1e-6
_HALF_BOUND_TOL = 1e-8
_STAR_BOUND_TOL = 1e-9
_DEPTH_TOL = 1e-7
_TAIL_SE = 4


class Violation(NamedTuple):
    key: str
    message: str


class ConfigError(ValueError):
    """An experiment config that cannot be run.

    Attributes
    ----------
      violations: Every problem found, each naming the offending key.

    """

    def __init__(self, violations: Sequence[Violation]) -> None:
        self.violations = list(violations)
        super().__init__(
            "; ".join(f"{key}: {message}" for key, message in self.violations)
        )


class PropertyViolationError(RuntimeError):
    """An exact inequality failed on some trial; the artifacts are written."""


class TrialError(RuntimeError):
    """A trial raised; the message names the kind and the task."""


class ExperimentConfig(NamedTuple):
    """A validated experiment config.

    Attributes
    ----------
      kind: One of `KINDS`.
      grid: Axis name to the tuple of its values.
      trials: Trials per grid point; Monte Carlo samples for tailbound.
      master_seed: Root of every derived seed.
      output: Artifact path prefix, or None.
      solver: Solver settings with defaults filled in.
      options: Kind-specific switches.
      document: The config exactly as loaded, echoed into summaries.

    """

    kind: str
    grid: dict[str, tuple[Any, ...]]
    trials: int
    master_seed: int
    output: str | None
    solver: dict[str, Any]
    options: dict[str, Any]
    document: dict[str, Any]

    @classmethod
    def create(cls, document: Mapping[str, Any]) -> ExperimentConfig:
        violations = validate(document)
        if violations:
            raise ConfigError(violations)
        solver = {
            "tol": _DEFAULT_TOL,
            "max_iter": _DEFAULT_MAX_ITER,
            "restarts": _DEFAULT_RESTARTS,
            "step_rule": "bb",
            "mode": "auto",
            "center_depth": _DEFAULT_CENTER_DEPTH,
            **document.get("solver", {}),
        }
        options = {
            "with_norm": False,
            "unweighted": False,
            "b_schedule": None,
            "kappa": _DEFAULT_KAPPA,
            **document.get("options", {}),
        }
        return cls(
            document["kind"],
            {axis: tuple(values) for axis, values in document["grid"].items()},
            int(document["trials"]),
            int(document.get("master_seed", 0)),
            document.get("output"),
            solver,
            options,
            dict(document),
        )

    @property
    def axes(self) -> tuple[str, ...]:
        required, optional = _AXES[self.kind]
        return required + tuple(axis for axis in optional if axis in self.grid)

    def grid_points(self) -> list[dict[str, Any]]:
        """Grid points in enumeration order; the index is the grid index."""
        axes = self.axes
        return [
            dict(zip(axes, values, strict=True))
            for values in itertools.product(*(self.grid[axis] for axis in axes))
        ]


def load_config(path: str) -> ExperimentConfig:
    """Read a JSON (or YAML) experiment config and validate it."""
    with open(path, encoding="utf-8") as fp:
        text = fp.read()
    try:
        document = json.loads(text)
    except json.JSONDecodeError:
        # YAML reads 1e-10 as a string, so JSON goes first.
        try:
            document = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError([Violation("<document>", str(e))]) from e
    if not isinstance(document, Mapping):
        raise ConfigError([Violation("<document>", "config must be a mapping")])
    return ExperimentConfig.create(document)


def _is_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_real(value: object) -> bool:
    return (_is_int(value) or isinstance(value, float)) and math.isfinite(value)


class _Validator:
    def __init__(self, document: Mapping[str, Any]) -> None:
        self.document = document
        self.violations: list[Violation] = []

    def flag(self, key: str, message: str) -> None:
        self.violations.append(Violation(key, message))

    def values(self, axis: str) -> list[Any]:
        grid = self.document.get("grid")
        if not isinstance(grid, Mapping):
            return []
        values = grid.get(axis)
        return list(values) if isinstance(values, list) else []

    def each(
        self,
        axis: str,
        test: Callable[[Any], bool],
        message: str,
    ) -> None:
        for value in self.values(axis):
            if not test(value):
                self.flag(f"grid.{axis}", f"{message}, got {value!r}")

    def settings(self, section: str, schema: Mapping[str, type]) -> None:
        block = self.document.get(section, {})
        if not isinstance(block, Mapping):
            self.flag(section, "must be a mapping")
            return
        for key, value in block.items():
            expected = schema.get(key)
            if expected is None:
                self.flag(f"{section}.{key}", "unknown key")
            elif expected is float and not _is_real(value):
                self.flag(f"{section}.{key}", f"must be a number, got {value!r}")
            elif expected is int and not _is_int(value):
                self.flag(f"{section}.{key}", f"must be an integer, got {value!r}")
            elif expected in {bool, str} and not isinstance(value, expected):
                name = expected.__name__
                self.flag(f"{section}.{key}", f"must be a {name}, got {value!r}")


def validate(config: ExperimentConfig | Mapping[str, Any]) -> list[Violation]:  # noqa: C901, PLR0912, PLR0915
    """Every precondition the config breaks, each naming its key."""
    document = config.document if isinstance(config, ExperimentConfig) else config
    check = _Validator(document)

    for key in document:
        if key not in _TOP_KEYS:
            check.flag(str(key), "unknown key")

    kind = document.get("kind")
    if kind not in KINDS:
        check.flag("kind", f"must be one of {', '.join(KINDS)}, got {kind!r}")
        return check.violations

    trials = document.get("trials")
    if not _is_int(trials) or trials < 1:
        check.flag("trials", f"must be an integer of at least 1, got {trials!r}")
    elif kind == "tailbound" and trials < MIN_TAIL_TRIALS:
        check.flag(
            "trials", f"tailbound needs at least {MIN_TAIL_TRIALS}, got {trials}"
        )
    seed = document.get("master_seed", 0)
    if not _is_int(seed) or not 0 <= seed < 2**64:
        check.flag("master_seed", f"must be an integer in [0, 2^64), got {seed!r}")
    output = document.get("output")
    if output is not None and not isinstance(output, str):
        check.flag("output", f"must be a path prefix, got {output!r}")
    check.settings("solver", _SOLVER_KEYS)
    check.settings("options", _OPTION_KEYS)
    solver = document.get("solver", {})
    if isinstance(solver, Mapping):
        if solver.get("step_rule", "bb") not in _STEP_RULES:
            check.flag("solver.step_rule", f"must be one of {', '.join(_STEP_RULES)}")
        if solver.get("mode", "auto") not in _SOLVER_MODES:
            check.flag("solver.mode", f"must be one of {', '.join(_SOLVER_MODES)}")
        for key in ("max_iter", "restarts", "center_depth"):
            value = solver.get(key, 1)
            if _is_int(value) and value < 1:
                check.flag(f"solver.{key}", f"must be at least 1, got {value}")
        tol = solver.get("tol", _DEFAULT_TOL)
        if _is_real(tol) and not tol > 0:
            check.flag("solver.tol", f"must be positive, got {tol}")
    options = document.get("options", {})
    if not isinstance(options, Mapping):
        options = {}
    kappa = options.get("kappa", _DEFAULT_KAPPA)
    if _is_real(kappa) and not kappa > 0:
        check.flag("options.kappa", f"must be positive, got {kappa}")

    grid = document.get("grid")
    if not isinstance(grid, Mapping):
        check.flag("grid", "must be a mapping of axis name to a list of values")
        return check.violations
    required, optional = _AXES[kind]
    for axis, values in grid.items():
        if axis not in required + optional:
            check.flag(f"grid.{axis}", f"unknown axis for {kind}")
        elif not isinstance(values, list) or not values:
            check.flag(f"grid.{axis}", "must be a nonempty list")
    for axis in required:
        if axis not in grid:
            check.flag(f"grid.{axis}", "missing")

    check.each(
        "d", lambda d: _is_int(d) and d >= 3, "degree must be an integer >= 3"  # noqa: PLR2004
    )
    check.each("n", _is_int, "n must be an integer")
    degrees = [d for d in check.values("d") if _is_int(d)]
    for n in check.values("n"):
        if not _is_int(n):
            continue
        for d in degrees:
            if n <= d:
                check.flag("grid.n", f"n must exceed d, got n={n}, d={d}")
            elif n * d % 2:
                check.flag("grid.n", f"n*d must be even, got n={n}, d={d}")

    if kind == "variational":
        has_gamma, has_alpha = "gamma" in grid, "alpha" in grid
        if has_gamma == has_alpha:
            check.flag("grid", "variational needs exactly one of gamma and alpha")
        check.each(
            "L", lambda depth: _is_int(depth) and depth >= 1, "depth must be at least 1"
        )
        check.each(
            "gamma",
            lambda g: _is_real(g) and g >= 0.5,  # noqa: PLR2004
            "gamma must be at least 1/2",
        )
        check.each("alpha", lambda a: _is_real(a) and a > 1, "alpha must exceed 1")
    elif kind == "tailbound":
        check.each("alpha", lambda a: _is_real(a) and a > 0, "alpha must be positive")
        check.each("m", lambda m: _is_int(m) and m >= 1, "m must be an integer >= 1")
        check.each("b", lambda b: _is_real(b) and b > 1, "b must exceed 1")
        check.each(
            "L_offset", lambda x: _is_real(x) and x > 0, "L_offset must be positive"
        )
        check.each("C", lambda c: _is_real(c) and c >= 1, "C must be at least 1")
    else:
        check.each("alpha", lambda a: _is_real(a) and a > 0, "alpha must be positive")
        check.each("eps", lambda e: _is_real(e) and 0 < e < 1, "eps must lie in (0, 1)")
        check.each("b", lambda b: _is_real(b) and b > 0, "b must be positive")
        check.each(
            "radius", lambda r: _is_int(r) and r >= 1, "radius must be an integer >= 1"
        )

    if kind == "shattering":
        schedule = options.get("b_schedule")
        if ("b" in grid) == (schedule is not None):
            check.flag("grid.b", "give exactly one of grid.b and options.b_schedule")
        if schedule is not None and schedule not in _B_SCHEDULES:
            check.flag(
                "options.b_schedule",
                f"must be one of {', '.join(_B_SCHEDULES)}, got {schedule!r}",
            )
    return check.violations


class LocalizationTask(NamedTuple):
    n: int
    d: int
    alpha: float
    eps: float
    grid: int
    trial: int
    seed: int
    unweighted: bool
    kappa: float
    tol: float
    max_iter: int


class LocalizationRecord(NamedTuple):
    n: int
    d: int
    alpha: float
    eps: float
    unweighted: bool
    grid: int
    trial: int
    seed: int
    lambda1: float
    residual: float
    converged: bool
    max_abs_weight: float
    b: float
    heavy_edges: int
    component_count: int
    largest_S: float  # noqa: N815
    isolated_mass: float
    min_support_size: int
    top_edge_mass: float
    disjoint_edges: int
    disjoint_mass: float
    heavy_component_count: int
    ipr: float
    participation: float
    lambda_dominates_max_weight: bool
    light_part_bounded: bool
    weyl_triangle: bool


def localization_trial(task: LocalizationTask) -> LocalizationRecord:
    """Where the top eigenvector of one network puts its mass.

    Heavy components are those whose S reaches (1 - eps) times the largest.
    """
    network = network_for_trial(task.n, task.d, task.alpha, task.seed)
    if task.unweighted:
        network = WeightedNetwork.unit(network.graph, task.alpha)
    params = DecompositionParams.from_schedule(task.n, task.alpha, task.kappa)
    decomposition = decompose(network, params)
    top = lambda_max(SparseSym.from_network(network), task.tol, task.max_iter)
    stats = component_stats(network, decomposition, top.vector)
    largest = stats[0].S if stats else 0.0
    report = localization_report(
        network,
        top.vector,
        task.eps,
        stats=stats,
        heavy_threshold=(1 - task.eps) * largest if stats else None,
    )
    checks = {check.name: check.passed for check in exact_checks(decomposition, top)}
    return LocalizationRecord(
        task.n,
        task.d,
        task.alpha,
        task.eps,
        task.unweighted,
        task.grid,
        task.trial,
        task.seed,
        top.value,
        top.residual,
        top.converged,
        network.max_abs_weight,
        params.b,
        int(decomposition.heavy.sum()),
        len(stats),
        largest,
        isolated_mass(decomposition, top.vector),
        report.min_support_size,
        report.top_edge_mass,
        len(report.disjoint_edges),
        report.disjoint_mass,
        report.heavy_component_count or 0,
        report.ipr,
        report.participation,
        checks["lambda_dominates_max_weight"],
        checks["light_part_bounded"],
        checks["weyl_triangle"],
    )


class CensusTask(NamedTuple):
    n: int
    d: int
    radius: int | None
    grid: int
    trial: int
    seed: int


class CensusRecord(NamedTuple):
    n: int
    d: int
    radius: int
    grid: int
    trial: int
    seed: int
    attempts: int
    max_excess: int
    cyclic_vertex_count: int
    cyclic_cap: int
    within_cap: bool


def census_trial(task: CensusTask) -> CensusRecord:
    graph = generate_regular(task.n, task.d, derive_seed(task.seed, 0))
    radius = task.radius or default_census_radius(task.n, task.d)
    result = census(graph, radius)
    return CensusRecord(
        task.n,
        task.d,
        radius,
        task.grid,
        task.trial,
        task.seed,
        graph.attempts,
        result.max_excess,
        result.cyclic_vertex_count,
        result.cyclic_cap,
        result.within_cap,
    )


class TailboundTask(NamedTuple):
    alpha: float
    m: int
    b: float
    L: float
    C: float
    grid: int
    seed: int
    samples: int


class TailboundRecord(NamedTuple):
    alpha: float
    m: int
    b: float
    L: float
    C: float
    grid: int
    seed: int
    estimate: float
    lower: float
    upper: float
    hits: int
    samples: int
    bound: float
    exact: float | None


def tailbound_trial(task: TailboundTask) -> TailboundRecord:
    query = TailBoundQuery.create(task.m, task.L, task.b, task.C)
    estimate = mc_sum_tail(task.alpha, task.m, task.L, task.b, task.samples, task.seed)
    exact = conditioned_tail_exact(task.L, task.b) if task.m == 1 else None
    return TailboundRecord(
        task.alpha,
        task.m,
        task.b,
        task.L,
        task.C,
        task.grid,
        task.seed,
        estimate.estimate,
        estimate.lower,
        estimate.upper,
        estimate.hits,
        estimate.trials,
        weibull_sum_bound(query),
        exact,
    )


class VariationalTask(NamedTuple):
    d: int
    L: int
    gamma: float
    alpha: float | None
    grid: int
    seed: int
    restarts: int
    step_rule: str
    tol: float
    mode: str
    max_iter: int


class VariationalRecord(NamedTuple):
    d: int
    L: int
    gamma: float
    alpha: float | None
    grid: int
    seed: int
    value: float
    h: float | None
    converged: bool
    restarts: int
    mode: str
    iterations: int
    gradient_norm: float


def variational_trial(task: VariationalTask) -> VariationalRecord:
    solution = solve_kdl(
        task.d,
        task.L,
        task.gamma,
        restarts=task.restarts,
        step_rule=task.step_rule,
        tol=task.tol,
        mode=task.mode,
        max_iter=task.max_iter,
        seed=task.seed,
    )
    h = None if task.alpha is None else 2 ** (1 / task.alpha) * solution.value
    return VariationalRecord(
        task.d,
        task.L,
        task.gamma,
        task.alpha,
        task.grid,
        task.seed,
        solution.value,
        h,
        solution.converged,
        solution.restarts_used,
        solution.mode,
        solution.iterations,
        solution.gradient_norm,
    )


Record = (
    TransitionRecord
    | LocalizationRecord
    | ShatteringRecord
    | CensusRecord
    | TailboundRecord
    | VariationalRecord
)

_TRIALS: dict[str, Callable[[Any], Record]] = {
    "lln": transition_trial,
    "transition": transition_trial,
    "localization": localization_trial,
    "shattering": shattering_trial,
    "census": census_trial,
    "tailbound": tailbound_trial,
    "variational": variational_trial,
}

_TRANSITION_MEASURES = (
    "lambda1",
    "ratio",
    "max_abs_weight",
    "in_window",
    "above_lower_tail",
    "norm_ratio",
)
# Grouping keys and summarized measures of every kind's records.
_GROUP_KEYS = {
    "lln": ("d", "n", "alpha"),
    "transition": ("d", "n", "alpha"),
    "localization": ("d", "n", "alpha", "eps"),
    "shattering": ("d", "n", "b"),
    "census": ("d", "n", "radius"),
    "tailbound": ("alpha", "m", "b", "L", "C"),
    "variational": ("d", "L", "gamma"),
}
_MEASURES = {
    "lln": _TRANSITION_MEASURES,
    "transition": _TRANSITION_MEASURES,
    "localization": (
        "lambda1",
        "max_abs_weight",
        "component_count",
        "largest_S",
        "isolated_mass",
        "min_support_size",
        "top_edge_mass",
        "disjoint_edges",
        "disjoint_mass",
        "heavy_component_count",
        "participation",
    ),
    "shattering": ("max_component_edges", "heavy_edges", "exceeded"),
    "census": ("attempts", "max_excess", "cyclic_vertex_count", "within_cap"),
    "tailbound": ("estimate", "bound"),
    "variational": ("value", "h", "iterations"),
}
# Record fields that hold exact inequalities.
_EXACT = {
    "lln": ("lambda_dominates_max_weight",),
    "transition": ("lambda_dominates_max_weight",),
    "localization": (
        "lambda_dominates_max_weight",
        "light_part_bounded",
        "weyl_triangle",
    ),
}


class _Job(NamedTuple):
    kind: str
    task: tuple[Any, ...]


def _run_job(job: _Job) -> Record:
    try:
        return _TRIALS[job.kind](job.task)
    except Exception as e:
        msg = f"{job.kind} trial {job.task!r} failed: {e}"
        raise TrialError(msg) from e


def plan(config: ExperimentConfig) -> list[_Job]:  # noqa: C901
    """The jobs of an experiment in output order: grid points, then trials."""
    solver, options = config.solver, config.options
    master, trials = config.master_seed, config.trials
    tasks: list[tuple[Any, ...]] = []
    centers: dict[tuple[int, float], float] = {}
    for g, point in enumerate(config.grid_points()):
        if config.kind in {"lln", "transition"}:
            key = (point["d"], point["alpha"])
            if key not in centers:
                centers[key] = lln_center(*key, solver["center_depth"])
            tasks.extend(
                TransitionTask(
                    point["n"],
                    point["d"],
                    float(point["alpha"]),
                    g,
                    t,
                    trial_seed(master, g, t),
                    centers[key],
                    options["with_norm"],
                    solver["tol"],
                    solver["max_iter"],
                )
                for t in range(trials)
            )
        elif config.kind == "localization":
            tasks.extend(
                LocalizationTask(
                    point["n"],
                    point["d"],
                    float(point["alpha"]),
                    float(point["eps"]),
                    g,
                    t,
                    trial_seed(master, g, t),
                    options["unweighted"],
                    float(options["kappa"]),
                    solver["tol"],
                    solver["max_iter"],
                )
                for t in range(trials)
            )
        elif config.kind == "shattering":
            b = point.get("b")
            if b is None:
                b = math.log(point["n"]) / 3
            tasks.extend(
                ShatteringTask(
                    point["n"], point["d"], float(b), g, t, trial_seed(master, g, t)
                )
                for t in range(trials)
            )
        elif config.kind == "census":
            tasks.extend(
                CensusTask(
                    point["n"],
                    point["d"],
                    point.get("radius"),
                    g,
                    t,
                    trial_seed(master, g, t),
                )
                for t in range(trials)
            )
        elif config.kind == "tailbound":
            m, b = point["m"], float(point["b"])
            tasks.append(
                TailboundTask(
                    float(point["alpha"]),
                    m,
                    b,
                    m * b + float(point["L_offset"]),
                    float(point.get("C", 1.0)),
                    g,
                    trial_seed(master, g, 0),
                    trials,
                )
            )
        else:
            alpha = point.get("alpha")
            gamma = gamma_from_alpha(alpha) if alpha is not None else point["gamma"]
            tasks.append(
                VariationalTask(
                    point["d"],
                    point["L"],
                    float(gamma),
                    None if alpha is None else float(alpha),
                    g,
                    trial_seed(master, g, 0),
                    solver["restarts"],
                    solver["step_rule"],
                    solver["tol"],
                    solver["mode"],
                    solver["max_iter"],
                )
            )
    return [_Job(config.kind, task) for task in tasks]


def format_cell(value: object) -> str:
    """CSV text of a record field; reals keep 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool | np.bool_):
        return "true" if value else "false"
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return format(float(value), ".17g")
    return str(value)


def write_records(fp: IO[str], kind: str, records: Sequence[Record]) -> None:
    """Write records as CSV under a versioned header."""
    writer = csv.writer(fp, lineterminator="\n")
    fields = records[0]._fields if records else ()
    writer.writerow(("schema_version", "kind", *fields))
    for record in records:
        writer.writerow(
            (str(SCHEMA_VERSION), kind, *(format_cell(value) for value in record))
        )


def describe(values: Iterable[float]) -> dict[str, float | int]:
    """Count, median, quartiles, mean and the 95% half-width 1.96 sd / sqrt(k)."""
    data = np.asarray(list(values), dtype=np.float64)
    q1, median, q3 = np.quantile(data, [0.25, 0.5, 0.75])
    sd = float(np.std(data, ddof=1)) if len(data) > 1 else 0.0
    return {
        "count": len(data),
        "median": float(median),
        "q1": float(q1),
        "q3": float(q3),
        "mean": float(data.mean()),
        "ci_half_width": _Z_95 * sd / math.sqrt(len(data)),
    }


def _plain(value: object) -> object:
    if isinstance(value, np.generic):
        return value.item()
    return value


def group_records(
    records: Iterable[Record], keys: Sequence[str]
) -> dict[tuple[Any, ...], list[Record]]:
    """Records by key tuple, in order of first appearance."""
    groups: dict[tuple[Any, ...], list[Record]] = {}
    for record in records:
        key = tuple(_plain(getattr(record, name)) for name in keys)
        groups.setdefault(key, []).append(record)
    return groups


def summarize_groups(kind: str, records: Sequence[Record]) -> list[dict[str, Any]]:
    keys = _GROUP_KEYS[kind]
    summary = []
    for key, rows in group_records(records, keys).items():
        measures = {}
        for name in _MEASURES[kind]:
            values = [getattr(row, name) for row in rows]
            present = [float(value) for value in values if value is not None]
            if present:
                measures[name] = describe(present)
        summary.append(
            {
                "key": dict(zip(keys, key, strict=True)),
                "count": len(rows),
                "measures": measures,
            }
        )
    return summary


def _context(record: Record) -> str:
    fields = record._asdict()
    return " ".join(
        f"{name}={_plain(fields[name])!r}"
        for name in ("n", "d", "alpha", "grid", "trial", "seed")
        if name in fields
    )


def exact_failures(
    kind: str, records: Sequence[Record]
) -> dict[str, list[Record]]:
    """Per exact inequality, the records on which it failed."""
    failures = {}
    for field in _EXACT.get(kind, ()):
        failures[field] = [record for record in records if not getattr(record, field)]
    return failures


def _exact_checks(kind: str, records: Sequence[Record]) -> list[Check]:
    checks = []
    for name, failed in exact_failures(kind, records).items():
        detail = f"{len(failed)} of {len(records)} records violate"
        if failed:
            detail += ": " + "; ".join(_context(record) for record in failed[:5])
        checks.append(Check(name, not failed, detail))
    return checks


def _lln_checks(records: Sequence[Record]) -> list[Check]:
    checks = []
    by_law = group_records(records, ("d", "alpha"))
    for (d, alpha), rows in by_law.items():
        by_n = group_records(rows, ("n",))
        if len(by_n) < 2:  # noqa: PLR2004
            continue
        medians = [
            (n, float(np.median([row.ratio for row in group])))
            for (n,), group in sorted(by_n.items())
        ]
        passed = all(a[1] >= b[1] for a, b in itertools.pairwise(medians))
        detail = f"d={d} alpha={alpha!r} medians " + ", ".join(
            f"n={n}: {median:.6g}" for n, median in medians
        )
        checks.append(Check("median_ratio_nonincreasing", passed, detail))
    return checks


def _exceedance_checks(
    name: str,
    records: Sequence[Record],
    keys: Sequence[str],
    failed: Callable[[Any], bool],
    note: Callable[[tuple[Any, ...]], str],
) -> list[Check]:
    checks = []
    for key, rows in group_records(records, keys).items():
        frequency = sum(failed(row) for row in rows) / len(rows)
        detail = ", ".join(f"{k}={v!r}" for k, v in zip(keys, key, strict=True))
        detail += f": exceeded in {frequency:.4g} of {len(rows)} trials{note(key)}"
        checks.append(Check(name, frequency <= _EXCEEDANCE_MARGIN, detail))
    return checks


def _union_bound_note(key: tuple[Any, ...]) -> str:
    d, n, b = key
    return f", union bound {shattering_union_bound(n, d, b):.4g}"


def _tailbound_checks(records: Sequence[TailboundRecord]) -> list[Check]:
    dominated = [row for row in records if row.lower > row.bound]
    checks = [
        Check(
            "tail_bound_dominates",
            not dominated,
            f"{len(dominated)} of {len(records)} points with the 99% interval "
            "above the bound",
        )
    ]
    exact = [row for row in records if row.exact is not None]
    if exact:
        off = [
            row
            for row in exact
            if abs(row.estimate - row.exact)
            > _TAIL_SE * math.sqrt(row.exact * (1 - row.exact) / row.samples)
            + 1 / row.samples
        ]
        checks.append(
            Check(
                "single_summand_exact_tail",
                not off,
                f"{len(off)} of {len(exact)} single-summand points beyond "
                f"{_TAIL_SE} standard errors",
            )
        )
    return checks


def _variational_checks(records: Sequence[VariationalRecord]) -> list[Check]:
    checks = []
    closed = [row for row in records if row.gamma >= 1]
    if closed:
        off = [
            row
            for row in closed
            if abs(row.value - kd_closed_form(row.gamma)) > _CLOSED_FORM_TOL
        ]
        checks.append(
            Check(
                "closed_form",
                not off,
                f"{len(off)} of {len(closed)} points off 2^(1/(2 gamma) - 1)",
            )
        )
    half = [row for row in records if row.gamma == 0.5 and row.L >= 2]  # noqa: PLR2004
    if half:
        off = []
        for row in half:
            lower, upper = kdl_half_bounds(row.d, row.L)
            if not lower - _HALF_BOUND_TOL <= row.value / 2 <= upper + _HALF_BOUND_TOL:
                off.append(row)
        checks.append(
            Check(
                "half_bounds",
                not off,
                f"{len(off)} of {len(half)} points outside the gamma = 1/2 bounds",
            )
        )
    starred = [
        row for row in records if row.alpha is not None and row.alpha > 2  # noqa: PLR2004
    ]
    if starred:
        off = [
            row
            for row in starred
            if row.h < star_bound(row.d, row.alpha) - _STAR_BOUND_TOL
        ]
        checks.append(
            Check("star_bound", not off, f"{len(off)} of {len(starred)} points below")
        )
    for (d, gamma), rows in group_records(records, ("d", "gamma")).items():
        values = [row.value for row in sorted(rows, key=lambda row: row.L)]
        if len(values) > 1:
            passed = all(b >= a - _DEPTH_TOL for a, b in itertools.pairwise(values))
            checks.append(
                Check(
                    "nondecreasing_in_depth",
                    passed,
                    f"d={d} gamma={gamma!r} over depths "
                    + ", ".join(str(row.L) for row in sorted(rows, key=lambda r: r.L)),
                )
            )
    return checks


def property_checks(kind: str, records: Sequence[Record]) -> list[Check]:
    """Exact checks first, then the statistical and numerical ones."""
    checks = _exact_checks(kind, records)
    if kind == "lln":
        checks += _lln_checks(records)
    elif kind == "shattering":
        checks += _exceedance_checks(
            "shattering_cap",
            records,
            ("d", "n", "b"),
            lambda row: row.exceeded,
            _union_bound_note,
        )
    elif kind == "census":
        checks += _exceedance_checks(
            "cyclic_vertices_within_cap",
            records,
            ("d", "n", "radius"),
            lambda row: not row.within_cap,
            lambda _: "",
        )
    elif kind == "tailbound":
        checks += _tailbound_checks(records)
    elif kind == "variational":
        checks += _variational_checks(records)
    for check in checks:
        if not check.passed:
            _logger.warning("check %s failed: %s", check.name, check.detail)
    return checks


def summarize(
    config: ExperimentConfig, records: Sequence[Record], checks: Sequence[Check]
) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": config.kind,
        "config": config.document,
        "records": len(records),
        "groups": summarize_groups(config.kind, records),
        "checks": [
            {"name": check.name, "passed": bool(check.passed), "detail": check.detail}
            for check in checks
        ],
    }


def write_summary(fp: IO[str], summary: Mapping[str, Any], fmt: str = "json") -> None:
    if fmt == "json":
        json.dump(summary, fp, indent=2)
        fp.write("\n")
    elif fmt == "yaml":
        yaml.dump(dict(summary), fp, default_flow_style=False, sort_keys=False)
    else:
        msg = f"summary format must be one of {SUMMARY_FORMATS}, got {fmt!r}"
        raise ValueError(msg)


class RunResult(NamedTuple):
    csv_path: str
    summary_path: str
    records: list[Record]
    checks: list[Check]


def run(
    config: ExperimentConfig,
    *,
    out: str | None = None,
    threads: int | None = None,
    summary_format: str = "json",
) -> RunResult:
    """Run every trial, then write `<prefix>.csv` and the summary.

    The prefix is `out`, else the config's output, else the kind. Raises
    PropertyViolationError after writing when an exact inequality failed.
    """
    if summary_format not in SUMMARY_FORMATS:
        msg = f"summary format must be one of {SUMMARY_FORMATS}, got {summary_format!r}"
        raise ValueError(msg)
    prefix = out or config.output or config.kind
    jobs = plan(config)
    points = len(config.grid_points())
    _logger.info(
        "%s experiment: %d tasks over %d grid points", config.kind, len(jobs), points
    )
    records = run_ordered(_run_job, jobs, threads)
    checks = property_checks(config.kind, records)

    directory = os.path.dirname(prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)
    csv_path = f"{prefix}.csv"
    summary_path = f"{prefix}.{summary_format}"
    with open(csv_path, "w", encoding="utf-8", newline="") as fp:
        write_records(fp, config.kind, records)
    with open(summary_path, "w", encoding="utf-8") as fp:
        write_summary(fp, summarize(config, records, checks), summary_format)
    _logger.info("wrote %s and %s", csv_path, summary_path)

    exact = set(_EXACT.get(config.kind, ()))
    failed = [check for check in checks if check.name in exact and not check.passed]
    if failed:
        msg = "; ".join(f"{check.name}: {check.detail}" for check in failed)
        raise PropertyViolationError(msg)
    return RunResult(csv_path, summary_path, records, checks)
