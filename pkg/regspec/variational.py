"""Simplex-constrained variational problems on finite regular trees.

For a tree with undirected edges E and a probability vector u on its vertices,
the edge form is

    G(u) = 2 * sum_{(i, j) in E} (u_i * u_j) ** gamma,

the factor two counting every edge in both directions, and the objective is
G(u) ** (1 / (2 * gamma)). Its maximum over the depth-L d-regular tree,
K(d, L, gamma), is nondecreasing in L. The largest-eigenvalue constant of
Weibull-weighted regular graphs is h(d, alpha) = 2**(1/alpha) * K(d, beta/2)
for alpha > 2, with beta the conjugate exponent of alpha, and 1 for
1 < alpha <= 2.

The level-reduced parameterization keeps one mass per level, spread evenly
over the level's vertices. With N_l vertices at level l and mass m_l, the
edge form becomes 2 * sum_l c_l * (m_l * m_{l+1}) ** gamma with
log c_l = log N_{l+1} - gamma * (log N_l + log N_{l+1}).
"""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import functools
import logging
import math
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from regspec.rng import derive_seed, make_rng

if TYPE_CHECKING:
    from collections.abc import Sequence

_logger = logging.getLogger().getChild(__name__)

_DEFAULT_RESTARTS = 16
_DEFAULT_TOL = 1e-10
_DEFAULT_MAX_ITER = 5000
_DEFAULT_STEP_RULE = "bb"
_DEFAULT_NEAR_C = 5.0
_DEFAULT_L_MAX = 20
_DEFAULT_HD_RESTARTS = 4
_FULL_MAX_DEPTH = 6
_FULL_MAX_DEGREE = 5
_FULL_MAX_VERTICES = 2_000_000

_SIMPLEX_SLACK = 1e-9
_GRADIENT_FLOOR = float(np.finfo(np.float64).eps)
_ROUNDING = 8 * _GRADIENT_FLOOR
_SCALED_CAP = 100.0
_ARMIJO = 1e-4
_MAX_BACKTRACKS = 60
_STEP_RULES = ("bb", "armijo")
_MODES = ("auto", "full", "reduced")


class SimplexViolationError(ValueError):
    pass


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {u >= 0, sum(u) = 1}, sort based."""
    v = np.asarray(v, dtype=np.float64)
    ordered = np.sort(v)[::-1]
    cumulative = np.cumsum(ordered) - 1.0
    index = np.arange(1, len(v) + 1)
    rho = np.count_nonzero(ordered - cumulative / index > 0)
    theta = cumulative[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def project_simplex_scaled(v: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """Projection onto the simplex in the metric sum((x - v)**2 / scale).

    The result is max(v - theta * scale, 0) for the theta that makes it sum to
    one; a scale of all ones gives `project_simplex`.
    """
    v = np.asarray(v, dtype=np.float64)
    scale = np.asarray(scale, dtype=np.float64)
    if v.shape != scale.shape or not np.all(scale > 0):
        msg = "scale must be positive and match the vector"
        raise ValueError(msg)
    order = np.argsort(-(v / scale), kind="stable")
    ordered, weights = v[order], scale[order]
    thetas = (np.cumsum(ordered) - 1.0) / np.cumsum(weights)
    rho = int(np.flatnonzero(ordered - thetas * weights > 0)[-1]) + 1
    return np.maximum(v - thetas[rho - 1] * scale, 0.0)


def _check_gamma(gamma: float) -> None:
    if not gamma >= 0.5:  # noqa: PLR2004
        msg = f"gamma must be at least 1/2, got {gamma}"
        raise ValueError(msg)


def _check_simplex(u: np.ndarray) -> None:
    if len(u) == 0 or u.min() < -_SIMPLEX_SLACK or abs(u.sum() - 1) > _SIMPLEX_SLACK:
        msg = "vector is not on the probability simplex"
        raise SimplexViolationError(msg)


class FiniteTree:
    """The d-regular tree of depth L with breadth-first vertex numbering.

    The root is vertex 0; level l >= 1 holds d * (d-1)**(l-1) vertices, and the
    k-th vertex of level l >= 2 is a child of vertex k // (d-1) of level l-1.
    The tree of depth L is the prefix of the tree of depth L+1.

    Attributes
    ----------
      d: Degree of every non-leaf vertex.
      L: Depth.
      level_sizes: Vertex count per level, exact integers.
      offsets: First vertex id per level.
      vertex_count: Total number of vertices.

    """

    def __init__(self, d: int, L: int) -> None:  # noqa: N803
        if d < 3:  # noqa: PLR2004
            msg = f"tree degree must be at least 3, got {d}"
            raise ValueError(msg)
        if L < 0:
            msg = f"tree depth must be nonnegative, got {L}"
            raise ValueError(msg)
        self.d = d
        self.L = L
        self.level_sizes = [1] + [
            d * (d - 1) ** (level - 1) for level in range(1, L + 1)
        ]
        self.offsets = [0]
        for size in self.level_sizes:
            self.offsets.append(self.offsets[-1] + size)
        self.vertex_count = self.offsets.pop()

    @property
    def log_level_sizes(self) -> np.ndarray:
        levels = np.arange(1, self.L + 1)
        return np.concatenate(
            ([0.0], math.log(self.d) + (levels - 1) * math.log(self.d - 1))
        )

    @functools.cached_property
    def edges(self) -> np.ndarray:
        """(parent, child) pairs for every non-root vertex, by child id."""
        if self.vertex_count > _FULL_MAX_VERTICES:
            msg = f"tree with {self.vertex_count} vertices is too large to list"
            raise ValueError(msg)
        parents = np.zeros(self.vertex_count - 1, dtype=np.int64)
        for level in range(2, self.L + 1):
            start, size = self.offsets[level], self.level_sizes[level]
            local = np.arange(size) // (self.d - 1)
            parents[start - 1 : start - 1 + size] = self.offsets[level - 1] + local
        children = np.arange(1, self.vertex_count, dtype=np.int64)
        edges = np.stack((parents, children), axis=1)
        edges.flags.writeable = False
        return edges

    @functools.cached_property
    def levels(self) -> np.ndarray:
        return np.repeat(np.arange(self.L + 1), self.level_sizes)

    def spread(self, masses: np.ndarray) -> np.ndarray:
        """Vertex vector carrying level mass masses[l] evenly on level l."""
        masses = np.asarray(masses, dtype=np.float64)
        return masses[self.levels] / np.asarray(self.level_sizes, dtype=np.float64)[
            self.levels
        ]

    def level_masses(self, u: np.ndarray) -> np.ndarray:
        return np.bincount(self.levels, weights=u, minlength=self.L + 1)


def _edge_array(
    tree: FiniteTree | np.ndarray | Sequence[tuple[int, int]],
) -> np.ndarray:
    if isinstance(tree, FiniteTree):
        return tree.edges
    return np.asarray(tree, dtype=np.int64).reshape(-1, 2)


def objective(
    tree: FiniteTree | np.ndarray | Sequence[tuple[int, int]],
    u: np.ndarray,
    gamma: float,
) -> float:
    """(sum over directed edges of u_i**gamma * u_j**gamma) ** (1/(2 gamma))."""
    _check_gamma(gamma)
    u = np.asarray(u, dtype=np.float64)
    _check_simplex(u)
    edges = _edge_array(tree)
    powered = np.power(np.maximum(u, 0.0), gamma)
    heads = np.concatenate((edges[:, 0], edges[:, 1]))
    tails = np.concatenate((edges[:, 1], edges[:, 0]))
    directed = float(np.sum(powered[heads] * powered[tails]))
    return directed ** (1 / (2 * gamma))


def undirected_sum(
    edges: np.ndarray | Sequence[tuple[int, int]], u: np.ndarray, gamma: float
) -> float:
    """sum over undirected edges of (u_i * u_j) ** gamma."""
    edges = _edge_array(edges)
    u = np.maximum(np.asarray(u, dtype=np.float64), 0.0)
    return float(np.sum(np.power(u[edges[:, 0]] * u[edges[:, 1]], gamma)))


def _level_log_coefficients(d: int, L: int, gamma: float) -> np.ndarray:  # noqa: N803
    log_sizes = FiniteTree(d, L).log_level_sizes
    return log_sizes[1:] - gamma * (log_sizes[:-1] + log_sizes[1:])


def level_objective(d: int, L: int, masses: np.ndarray, gamma: float) -> float:  # noqa: N803
    """The objective of the level-reduced vector with level masses `masses`."""
    _check_gamma(gamma)
    masses = np.asarray(masses, dtype=np.float64)
    if masses.shape != (L + 1,):
        msg = f"expected {L + 1} level masses, got {masses.shape}"
        raise ValueError(msg)
    _check_simplex(masses)
    return _EdgeForm.levels(d, L, gamma).value(masses)


class _EdgeForm:
    """G(u) = 2 * sum_e c_e * (u_a * u_b) ** gamma over undirected edges."""

    def __init__(
        self,
        heads: np.ndarray,
        tails: np.ndarray,
        coefficients: np.ndarray,
        size: int,
        gamma: float,
    ) -> None:
        self.heads = heads
        self.tails = tails
        self.coefficients = coefficients
        self.size = size
        self.gamma = gamma

    @classmethod
    def tree(cls, edges: np.ndarray, size: int, gamma: float) -> _EdgeForm:
        return cls(edges[:, 0], edges[:, 1], np.ones(len(edges)), size, gamma)

    @classmethod
    def levels(cls, d: int, L: int, gamma: float) -> _EdgeForm:  # noqa: N803
        return cls(
            np.arange(L),
            np.arange(1, L + 1),
            np.exp(_level_log_coefficients(d, L, gamma)),
            L + 1,
            gamma,
        )

    def total(self, u: np.ndarray) -> float:
        powered = np.power(u, self.gamma)
        return 2.0 * float(
            np.sum(self.coefficients * powered[self.heads] * powered[self.tails])
        )

    def value(self, u: np.ndarray) -> float:
        return self.total(u) ** (1 / (2 * self.gamma))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        powered = np.power(u, self.gamma)
        # u**(gamma-1) is singular at zero for gamma < 1; masses below machine
        # epsilon are read as zero.
        base = u if self.gamma >= 1 else np.maximum(u, _GRADIENT_FLOOR)
        outer = self.gamma * np.power(base, self.gamma - 1.0)
        inner = np.bincount(
            self.heads,
            weights=self.coefficients * powered[self.tails],
            minlength=self.size,
        ) + np.bincount(
            self.tails,
            weights=self.coefficients * powered[self.heads],
            minlength=self.size,
        )
        return 2.0 * outer * inner


class _Ascent(NamedTuple):
    u: np.ndarray
    total: float
    gradient_norm: float
    iterations: int
    converged: bool


def _stationarity(u: np.ndarray, gradient: np.ndarray) -> float:
    return float(np.linalg.norm(project_simplex(u + gradient) - u))


class _Geometry(NamedTuple):
    """Step metric and step bounds at one iterate."""

    metric: np.ndarray | None
    initial: float
    cap: float

    @classmethod
    def create(cls, form: _EdgeForm, u: np.ndarray, gradient: np.ndarray) -> _Geometry:
        tiny = np.finfo(np.float64).tiny
        if form.gamma >= 1:
            cap = 0.5 / max(float(np.abs(gradient).max()), tiny)
            return cls(None, cap, cap)
        # Steps scale with the mass already on a coordinate; u**(gamma-1) makes
        # the curvature of a light coordinate grow like 1/u.
        metric = np.maximum(u, _GRADIENT_FLOOR)
        reference = float(u @ gradient)
        if reference <= 0:
            reference = float(np.max(metric * np.abs(gradient)))
        reference = max(reference, tiny)
        return cls(metric, 1 / reference, _SCALED_CAP / reference)

    def move(self, u: np.ndarray, gradient: np.ndarray, step: float) -> np.ndarray:
        if self.metric is None:
            return project_simplex(u + step * gradient)
        return project_simplex_scaled(u + step * self.metric * gradient, self.metric)

    def barzilai_borwein(
        self, s: np.ndarray, y: np.ndarray, previous: np.ndarray, u: np.ndarray
    ) -> float:
        curvature = float(s @ y)
        if curvature >= 0:
            return self.initial
        if self.metric is None:
            return float(s @ s) / -curvature
        midpoint = np.maximum((u + previous) / 2, _GRADIENT_FLOOR)
        return float(s @ (s / midpoint)) / -curvature


def _ascend(
    form: _EdgeForm,
    start: np.ndarray,
    tol: float,
    max_iter: int,
    step_rule: str,
) -> _Ascent:
    """Projected gradient ascent of G with Armijo backtracking along the arc.

    For gamma >= 1 the projection is Euclidean. Below one the step on each
    coordinate is weighted by its mass and the projection uses the matching
    metric. A step may lose up to rounding noise in G, so iterates keep moving
    once G has stopped changing in floating point.
    """
    u = project_simplex(start)
    total = form.total(u)
    gradient = form.gradient(u)
    step = 0.0
    previous: tuple[np.ndarray, np.ndarray] | None = None
    iteration = 0
    for iteration in range(max_iter):  # noqa: B007
        measure = _stationarity(u, gradient)
        if measure <= tol:
            return _Ascent(u, total, measure, iteration, converged=True)

        geometry = _Geometry.create(form, u, gradient)
        if step_rule == "bb" and previous is not None:
            step = geometry.barzilai_borwein(
                u - previous[0], gradient - previous[1], previous[0], u
            )
        else:
            step = 2 * step if step > 0 else geometry.initial
        step = min(step, geometry.cap)

        noise = _ROUNDING * abs(total)
        for _ in range(_MAX_BACKTRACKS):
            candidate = geometry.move(u, gradient, step)
            candidate_total = form.total(candidate)
            gain = _ARMIJO * float(gradient @ (candidate - u))
            if candidate_total >= total + gain - noise:
                break
            step /= 2
        else:
            _logger.debug("ascent stalled after %d iterations", iteration)
            break
        if np.array_equal(candidate, u):
            break
        previous = (u, gradient)
        u, total = candidate, candidate_total
        gradient = form.gradient(u)
    else:
        iteration = max_iter

    measure = _stationarity(u, gradient)
    return _Ascent(u, total, measure, iteration, converged=measure <= tol)


class VariationalSolution(NamedTuple):
    """Best local maximum found for K(d, L, gamma).

    `u` holds one entry per tree vertex in full mode and one level mass per
    level in reduced mode; either way it lies on the probability simplex.
    `value` is a lower bound on the true maximum.
    """

    d: int
    L: int
    gamma: float
    value: float
    u: np.ndarray
    mode: str
    restarts_used: int
    converged: bool
    gradient_norm: float
    iterations: int

    def level_masses(self) -> np.ndarray:
        if self.mode == "reduced":
            return self.u
        return FiniteTree(self.d, self.L).level_masses(self.u)


def half_construction(d: int, L: int) -> np.ndarray:  # noqa: N803
    """Level masses 1/L on levels 0..L-1 and nothing on level L.

    At gamma = 1/2 its undirected sum is (sqrt(d) + (L-2) sqrt(d-1)) / L.
    """
    if L < 2:  # noqa: PLR2004
        msg = f"construction needs depth at least 2, got {L}"
        raise ValueError(msg)
    if d < 3:  # noqa: PLR2004
        msg = f"degree must be at least 3, got {d}"
        raise ValueError(msg)
    masses = np.full(L + 1, 1.0 / L)
    masses[L] = 0.0
    return masses


def _pad(masses: np.ndarray, length: int) -> np.ndarray:
    padded = np.zeros(length)
    padded[: min(len(masses), length)] = masses[:length]
    return padded / padded.sum()


def _level_seeds(d: int, L: int) -> list[np.ndarray]:  # noqa: N803
    log_sizes = FiniteTree(d, L).log_level_sizes
    by_vertex = np.exp(log_sizes - log_sizes.max())
    seeds = [by_vertex / by_vertex.sum(), _pad(np.array([0.5, 0.5]), L + 1)]
    depths = sorted({L, max(2, (L + 1) // 2), min(L, 3)}, reverse=True)
    seeds += [_pad(half_construction(d, k), L + 1) for k in depths if k >= 2]  # noqa: PLR2004
    geometric = 0.5 ** np.arange(L + 1)
    seeds.append(geometric / geometric.sum())
    seeds.append(np.full(L + 1, 1.0 / (L + 1)))
    if L >= 2:  # noqa: PLR2004
        seeds.append(_pad(np.array([0.0, 0.5, 0.5]), L + 1))
    return seeds


def _structured_seeds(d: int, L: int, mode: str) -> list[np.ndarray]:  # noqa: N803
    levels = _level_seeds(d, L)
    if mode == "reduced":
        return levels
    tree = FiniteTree(d, L)
    single_edge = np.zeros(tree.vertex_count)
    single_edge[:2] = 0.5
    spread = [tree.spread(masses) for masses in levels]
    return [spread[0], single_edge, *spread[1:]]


def _resolve_mode(d: int, L: int, mode: str) -> str:  # noqa: N803
    if mode not in _MODES:
        msg = f"mode must be one of {_MODES}, got {mode!r}"
        raise ValueError(msg)
    if mode != "auto":
        return mode
    return "full" if L <= _FULL_MAX_DEPTH and d <= _FULL_MAX_DEGREE else "reduced"


def solve_kdl(  # noqa: PLR0913
    d: int,
    L: int,  # noqa: N803
    gamma: float,
    *,
    restarts: int = _DEFAULT_RESTARTS,
    step_rule: str = _DEFAULT_STEP_RULE,
    tol: float = _DEFAULT_TOL,
    mode: str = "auto",
    max_iter: int = _DEFAULT_MAX_ITER,
    seed: int = 0,
    initial: Sequence[np.ndarray] = (),
) -> VariationalSolution:
    """Maximize the edge-form objective over the depth-L d-regular tree.

    Args:
    ----
      d: Tree degree, at least 3.
      L: Tree depth, at least 1.
      gamma: Exponent, at least 1/2.
      restarts: Number of starting points; structured starts come first
        (uniform, single edge, star, level constructions), then Dirichlet
        draws. In full mode the first start is the level-reduced maximizer
        spread evenly over each level.
      step_rule: "bb" for Barzilai-Borwein initial steps, "armijo" for
        doubling the last accepted step.
      tol: Stationarity tolerance on the projected gradient.
      mode: "full", "reduced" or "auto" (full for L <= 6 and d <= 5).
      max_iter: Iteration cap per start.
      seed: Seed for the Dirichlet starts.
      initial: Extra starting points in the chosen mode's coordinates,
        tried before the others.

    Returns:
    -------
      The best solution over all starts; ties keep the earliest start.

    """
    if d < 3:  # noqa: PLR2004
        msg = f"degree must be at least 3, got {d}"
        raise ValueError(msg)
    if L < 1:
        msg = f"depth must be at least 1, got {L}"
        raise ValueError(msg)
    _check_gamma(gamma)
    if restarts < 1:
        msg = f"need at least one restart, got {restarts}"
        raise ValueError(msg)
    if step_rule not in _STEP_RULES:
        msg = f"step rule must be one of {_STEP_RULES}, got {step_rule!r}"
        raise ValueError(msg)
    mode = _resolve_mode(d, L, mode)

    tree = FiniteTree(d, L)
    if mode == "full":
        form = _EdgeForm.tree(tree.edges, tree.vertex_count, gamma)
    else:
        form = _EdgeForm.levels(d, L, gamma)

    starts = [np.asarray(start, dtype=np.float64) for start in initial]
    for start in starts:
        if start.shape != (form.size,):
            msg = f"initial point has shape {start.shape}, expected ({form.size},)"
            raise ValueError(msg)
    structured = _structured_seeds(d, L, mode)
    if mode == "full":
        symmetric = solve_kdl(
            d,
            L,
            gamma,
            restarts=restarts,
            step_rule=step_rule,
            tol=tol,
            mode="reduced",
            max_iter=max_iter,
            seed=seed,
        )
        structured.insert(0, tree.spread(symmetric.u))
    structured = structured[:restarts]
    rng = make_rng(derive_seed(seed, d, L))
    random = [
        rng.dirichlet(np.ones(form.size)) for _ in range(restarts - len(structured))
    ]
    starts += structured + random

    results = []
    for index, start in enumerate(starts):
        result = _ascend(form, start, tol, max_iter, step_rule)
        _logger.debug(
            "start %d: G=%.17g stationarity=%.3g after %d iterations",
            index,
            result.total,
            result.gradient_norm,
            result.iterations,
        )
        results.append(result)
    # max keeps the first of equal totals.
    best = max(results, key=lambda result: result.total)

    u = np.maximum(best.u, 0.0)
    u /= u.sum()
    if mode == "full":
        value = objective(tree, u, gamma)
    else:
        value = level_objective(d, L, u, gamma)
    if not best.converged:
        _logger.warning(
            "K(d=%d, L=%d, gamma=%g) unconverged: stationarity %.3g",
            d,
            L,
            gamma,
            best.gradient_norm,
        )
    return VariationalSolution(
        d,
        L,
        float(gamma),
        value,
        u,
        mode,
        len(starts),
        best.converged,
        best.gradient_norm,
        best.iterations,
    )


class TreeMaximum(NamedTuple):
    value: float
    u: np.ndarray
    converged: bool


def maximize_on_tree(
    edges: np.ndarray | Sequence[tuple[int, int]],
    gamma: float,
    *,
    restarts: int = _DEFAULT_RESTARTS,
    tol: float = _DEFAULT_TOL,
    max_iter: int = _DEFAULT_MAX_ITER,
    seed: int = 0,
) -> TreeMaximum:
    """Maximize the undirected sum over the simplex on an arbitrary tree.

    Starts from the uniform vector, every two-point edge vector, every star
    around a vertex, and `restarts` Dirichlet draws.
    """
    _check_gamma(gamma)
    edges = _edge_array(edges)
    size = int(edges.max()) + 1
    form = _EdgeForm.tree(edges, size, gamma)

    starts = [np.full(size, 1.0 / size)]
    for a, b in edges.tolist():
        start = np.zeros(size)
        start[[a, b]] = 0.5
        starts.append(start)
    for v in range(size):
        neighbors = np.concatenate(
            (edges[edges[:, 0] == v, 1], edges[edges[:, 1] == v, 0])
        )
        start = np.zeros(size)
        start[v] = 0.5
        start[neighbors] = 0.5 / len(neighbors)
        starts.append(start)
    rng = make_rng(derive_seed(seed, size))
    starts += [rng.dirichlet(np.ones(size)) for _ in range(restarts)]

    best = max(
        (_ascend(form, start, tol, max_iter, _DEFAULT_STEP_RULE) for start in starts),
        key=lambda result: result.total,
    )
    return TreeMaximum(best.total / 2, best.u, best.converged)


def kd_closed_form(gamma: float) -> float:
    """2**(1/(2 gamma) - 1), the maximum for every depth once gamma >= 1."""
    if not gamma >= 1:
        msg = f"closed form needs gamma >= 1, got {gamma}"
        raise ValueError(msg)
    return 2 ** (1 / (2 * gamma) - 1)


def gamma_from_alpha(alpha: float) -> float:
    """Half the conjugate exponent: alpha / (2 (alpha - 1))."""
    if not alpha > 1:
        msg = f"alpha must exceed 1, got {alpha}"
        raise ValueError(msg)
    return alpha / (alpha - 1) / 2


def star_bound(d: int, alpha: float) -> float:
    """d ** ((alpha - 2) / (2 alpha)), attained on the depth-one tree."""
    if not alpha > 2:  # noqa: PLR2004
        msg = f"star bound needs alpha > 2, got {alpha}"
        raise ValueError(msg)
    return d ** ((alpha - 2) / (2 * alpha))


def kdl_half_bounds(d: int, L: int) -> tuple[float, float]:  # noqa: N803
    """Bounds on the undirected gamma = 1/2 maximum over the depth-L tree."""
    if L < 2:  # noqa: PLR2004
        msg = f"bounds need depth at least 2, got {L}"
        raise ValueError(msg)
    if d < 3:  # noqa: PLR2004
        msg = f"degree must be at least 3, got {d}"
        raise ValueError(msg)
    lower = (math.sqrt(d) + (L - 2) * math.sqrt(d - 1)) / L
    return lower, math.sqrt(d - 1)


class HdRow(NamedTuple):
    L: int
    kdl: float
    h: float
    best: float
    mode: str
    converged: bool


class HdResult(NamedTuple):
    """Lower bound on h(d, alpha) with its convergence table over depth."""

    d: int
    alpha: float
    value: float
    table: tuple[HdRow, ...]
    ceiling: float


def h_d(  # noqa: PLR0913
    d: int,
    alpha: float,
    *,
    L_max: int = _DEFAULT_L_MAX,  # noqa: N803
    restarts: int = _DEFAULT_HD_RESTARTS,
    tol: float = _DEFAULT_TOL,
    max_iter: int = _DEFAULT_MAX_ITER,
    seed: int = 0,
) -> HdResult:
    """h(d, alpha), exactly 1 for alpha <= 2, else the best depth up to L_max.

    Every depth warm-starts from the previous depth's maximizer padded with an
    empty level, so `best` in the table is nondecreasing.
    """
    if not alpha > 1:
        msg = f"alpha must exceed 1, got {alpha}"
        raise ValueError(msg)
    ceiling = 2 * math.sqrt(d - 1)
    if alpha <= 2:  # noqa: PLR2004
        return HdResult(d, float(alpha), 1.0, (), ceiling)
    if L_max < 1:
        msg = f"L_max must be at least 1, got {L_max}"
        raise ValueError(msg)

    gamma = gamma_from_alpha(alpha)
    scale = 2 ** (1 / alpha)
    rows: list[HdRow] = []
    previous: VariationalSolution | None = None
    best = -math.inf
    for depth in range(1, L_max + 1):
        mode = _resolve_mode(d, depth, "auto")
        initial: list[np.ndarray] = []
        if previous is not None:
            if mode == "full" and previous.mode == "full":
                warm = np.zeros(FiniteTree(d, depth).vertex_count)
                warm[: len(previous.u)] = previous.u
            else:
                warm = _pad(previous.level_masses(), depth + 1)
            initial.append(warm)
        solution = solve_kdl(
            d,
            depth,
            gamma,
            restarts=restarts,
            tol=tol,
            mode=mode,
            max_iter=max_iter,
            seed=seed,
            initial=initial,
        )
        best = max(best, scale * solution.value)
        rows.append(
            HdRow(
                depth,
                solution.value,
                scale * solution.value,
                best,
                mode,
                solution.converged,
            )
        )
        _logger.debug("h(d=%d, alpha=%g) at L=%d: %.17g", d, alpha, depth, best)
        previous = solution
    _logger.info("h(d=%d, alpha=%g) >= %.12g over L <= %d", d, alpha, best, L_max)
    return HdResult(d, float(alpha), best, tuple(rows), ceiling)


class NearMaximizer(NamedTuple):
    edge: tuple[int, int] | None
    best_edge: tuple[int, int]
    best_min: float
    objective: float
    threshold: float


def near_maximizer_edge(
    tree: FiniteTree | np.ndarray | Sequence[tuple[int, int]],
    u: np.ndarray,
    gamma: float,
    epsilon: float,
    c: float = _DEFAULT_NEAR_C,
) -> NearMaximizer:
    """An edge carrying nearly half the mass at each end, if u is near optimal.

    When objective(u) >= (1 - epsilon) * 2**(1/(2 gamma) - 1), returns the edge
    maximizing min(u_i, u_j) provided that minimum is at least
    1/2 - c * sqrt(epsilon). Otherwise `edge` is None and the remaining fields
    say why.
    """
    if not gamma > 1:
        msg = f"near-maximizer edges need gamma > 1, got {gamma}"
        raise ValueError(msg)
    if not 0 < epsilon < 1:
        msg = f"epsilon must lie in (0, 1), got {epsilon}"
        raise ValueError(msg)
    u = np.asarray(u, dtype=np.float64)
    edges = _edge_array(tree)
    value = objective(edges, u, gamma)
    threshold = (1 - epsilon) * kd_closed_form(gamma)
    smaller = np.minimum(u[edges[:, 0]], u[edges[:, 1]])
    index = int(np.argmax(smaller))
    best_edge = (int(edges[index, 0]), int(edges[index, 1]))
    best_min = float(smaller[index])
    found = value >= threshold and best_min >= 0.5 - c * math.sqrt(epsilon)
    if value >= threshold and not found:
        _logger.warning(
            "objective %.6g meets threshold %.6g but best edge minimum is %.6g",
            value,
            threshold,
            best_min,
        )
    return NearMaximizer(
        best_edge if found else None, best_edge, best_min, value, threshold
    )
