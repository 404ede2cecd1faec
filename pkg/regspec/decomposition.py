"""Truncation of weighted networks and localization of the top eigenvector.

A network X splits at a truncation level b into the heavy part X1 (edges with
|W| > b**(1/alpha)) and the light part X2. The heavy edges fall apart into
small components; a breadth-first spanning tree of each component gives the
forest X11, and the remaining heavy edges, the tree-excess edges, form X12.
Every edge thus lies in exactly one of X11, X12 and X2.
"""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import logging
import math
from collections import deque
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from regspec.regular_graph import Components, components, generate_regular
from regspec.rng import derive_seed, trial_seed
from regspec.spectral import EigenPair, SparseSym, lambda_max, spectral_norm
from regspec.util import run_ordered
from regspec.variational import gamma_from_alpha, h_d, kd_closed_form
from regspec.weights import WeibullParams, WeightedNetwork, weigh

if TYPE_CHECKING:
    from collections.abc import Sequence

_logger = logging.getLogger().getChild(__name__)

_DEFAULT_KAPPA = 0.05
_DEFAULT_CENTER_DEPTH = 10
_DEFAULT_LOWER_TAIL_DELTA = 0.1
_CHECK_SLACK = 1e-8
_SUPPORT_SLACK = 1e-12

X11, X12, X2 = 0, 1, 2


class DecompositionParams(NamedTuple):
    """Truncation level b for weight shape alpha.

    Schedule-built parameters also carry n, kappa and the level a_n.
    """

    alpha: float
    b: float
    n: int | None = None
    kappa: float | None = None
    a: float | None = None

    @classmethod
    def create(cls, alpha: float, b: float) -> DecompositionParams:
        if not alpha > 0:
            msg = f"alpha must be positive, got {alpha}"
            raise ValueError(msg)
        if not b > 0:
            msg = f"truncation level must be positive, got {b}"
            raise ValueError(msg)
        return cls(float(alpha), float(b))

    @classmethod
    def from_schedule(
        cls, n: int, alpha: float, kappa: float = _DEFAULT_KAPPA
    ) -> DecompositionParams:
        """b_n and a_n as powers of log n.

        b_n = (log n)**(alpha/(2 alpha+1)), a_n = (log n)**((alpha+1)/(2 alpha+1)
        + kappa) for alpha > 1; b_n = (log n)**(alpha/(alpha+2)),
        a_n = (log n)**(2/(alpha+2) + kappa) for alpha <= 1.
        """
        if n < 3:  # noqa: PLR2004
            msg = f"schedule needs n >= 3, got {n}"
            raise ValueError(msg)
        if not kappa > 0:
            msg = f"kappa must be positive, got {kappa}"
            raise ValueError(msg)
        log_n = math.log(n)
        if alpha > 1:
            b = log_n ** (alpha / (2 * alpha + 1))
            a = log_n ** ((alpha + 1) / (2 * alpha + 1) + kappa)
        else:
            b = log_n ** (alpha / (alpha + 2))
            a = log_n ** (2 / (alpha + 2) + kappa)
        params = cls.create(alpha, b)
        return params._replace(n=n, kappa=kappa, a=a)

    @property
    def threshold(self) -> float:
        """Weight magnitude above which an edge is heavy."""
        return self.b ** (1 / self.alpha)

    @property
    def a_tilde(self) -> float | None:
        """a_n for alpha <= 2, log n beyond."""
        if self.n is None:
            return None
        return math.log(self.n) if self.alpha > 2 else self.a  # noqa: PLR2004


def truncate(
    network: WeightedNetwork, params: DecompositionParams
) -> tuple[np.ndarray, np.ndarray]:
    """Masks of the heavy edges X1 and the light edges X2."""
    heavy = np.abs(network.weights) > params.threshold
    return heavy, ~heavy


def split_excess(
    network: WeightedNetwork, heavy: np.ndarray, parts: Components
) -> np.ndarray:
    """Mask of the spanning-forest edges of the heavy subgraph.

    Each component's tree is the breadth-first tree from its lowest vertex
    over heavy edges; heavy edges outside the mask are tree-excess edges.
    """
    graph = network.graph
    tree = np.zeros(graph.edge_count, dtype=bool)
    visited = np.zeros(graph.n, dtype=bool)
    for k in parts.nontrivial().tolist():
        root = int(parts.vertices(k)[0])
        visited[root] = True
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, e in graph.masked_neighbors(v, heavy):
                if not visited[w]:
                    visited[w] = True
                    tree[e] = True
                    queue.append(w)
    return tree


class Decomposition:
    """The partition of a network's edges into X11, X12 and X2.

    Attributes
    ----------
      network: The decomposed network.
      params: Truncation parameters.
      heavy: Mask of X1 = X11 + X12.
      components: Components of the heavy subgraph.
      tree: Mask of X11, a spanning forest of the heavy subgraph.
      excess: Mask of X12.
      light: Mask of X2.
      part: Per-edge part index, X11, X12 or X2.

    """

    def __init__(self, network: WeightedNetwork, params: DecompositionParams) -> None:
        self.network = network
        self.params = params
        self.heavy, self.light = truncate(network, params)
        self.components = components(network.graph, self.heavy)
        self.tree = split_excess(network, self.heavy, self.components)
        self.excess = self.heavy & ~self.tree
        self.part = np.full(network.graph.edge_count, X2, dtype=np.int8)
        self.part[self.tree] = X11
        self.part[self.excess] = X12

    @property
    def excess_counts(self) -> np.ndarray:
        """|E| - |V| + 1 per component, zero for isolated vertices."""
        counts = self.components.edge_counts - self.components.vertex_counts + 1
        return np.where(self.components.edge_counts > 0, counts, 0)

    def tree_edges(self, k: int) -> np.ndarray:
        edges = self.components.edges(k)
        return edges[self.tree[edges]]

    def excess_edges(self, k: int) -> np.ndarray:
        edges = self.components.edges(k)
        return edges[self.excess[edges]]

    def matrix(self, part: int) -> SparseSym:
        return SparseSym(self.network.to_sparse(self.part == part))

    def max_component_edges(self) -> int:
        counts = self.components.edge_counts
        return int(counts.max()) if len(counts) else 0


def decompose(network: WeightedNetwork, params: DecompositionParams) -> Decomposition:
    decomposition = Decomposition(network, params)
    _logger.debug(
        "b=%g: %d heavy edges in %d components, %d excess edges",
        params.b,
        int(decomposition.heavy.sum()),
        len(decomposition.components.nontrivial()),
        int(decomposition.excess.sum()),
    )
    return decomposition


class ComponentStats(NamedTuple):
    """Eigenvector statistics of one heavy component's spanning tree.

    `S` is the l^alpha norm of the tree weights, `x` the eigenvector mass on
    the component, `F` the l^beta norm of |f_i f_j| over directed tree edges
    (alpha > 1 only), `M` the largest f_i**2 + f_j**2 over tree edges,
    `rayleigh` the tree's share of the Rayleigh quotient (directed edges) and
    `certificate` the Hoelder bound 2**(1/alpha) * S * F on it.
    """

    component: int
    vertex_count: int
    edge_count: int
    excess: int
    S: float
    x: float
    F: float | None
    M: float
    rayleigh: float
    certificate: float | None


def component_stats(
    network: WeightedNetwork,
    decomposition: Decomposition,
    f: np.ndarray,
    alpha: float | None = None,
) -> list[ComponentStats]:
    """Statistics of every heavy component, largest S first."""
    alpha = network.params.alpha if alpha is None else alpha
    beta = alpha / (alpha - 1) if alpha > 1 else None
    edges, weights = network.graph.edges, network.weights
    squared = f * f
    parts = decomposition.components
    excess = decomposition.excess_counts

    stats = []
    for k in parts.nontrivial().tolist():
        tree = decomposition.tree_edges(k)
        i, j = edges[tree, 0], edges[tree, 1]
        products = f[i] * f[j]
        S = float(np.sum(np.abs(weights[tree]) ** alpha) ** (1 / alpha))  # noqa: N806
        F = None  # noqa: N806
        certificate = None
        if beta is not None:
            F = float((2 * np.sum(np.abs(products) ** beta)) ** (1 / beta))  # noqa: N806
            certificate = 2 ** (1 / alpha) * S * F
        stats.append(
            ComponentStats(
                k,
                int(parts.vertex_counts[k]),
                int(parts.edge_counts[k]),
                int(excess[k]),
                S,
                float(np.sum(squared[parts.vertices(k)])),
                F,
                float(np.max(squared[i] + squared[j])),
                float(2 * np.sum(weights[tree] * products)),
                certificate,
            )
        )
    stats.sort(key=lambda row: (-row.S, row.component))
    return stats


def isolated_mass(decomposition: Decomposition, f: np.ndarray) -> float:
    """Eigenvector mass on vertices without heavy edges."""
    parts = decomposition.components
    alone = parts.edge_counts[parts.labels] == 0
    return float(np.sum(f[alone] ** 2))


class LocalizationReport(NamedTuple):
    """Where the top eigenvector's mass sits.

    `disjoint_edges` is a greedy matching of edges by descending
    f_i**2 + f_j**2, stopped once it captures (1-eps)**2 of the mass; it is
    empty for alpha >= 2. `ipr` is sum f_i**4 and `participation` its
    reciprocal.
    """

    min_support_size: int
    top_edge_mass: float
    disjoint_edges: np.ndarray
    disjoint_mass: float
    heavy_component_count: int | None
    ipr: float
    participation: float


def min_support_size(f: np.ndarray, eps: float) -> int:
    """Fewest coordinates whose l2 norm reaches (1 - eps) times that of f."""
    squared = np.sort(f * f)[::-1]
    cumulative = np.cumsum(squared)
    target = (1 - eps) ** 2 * cumulative[-1] * (1 - _SUPPORT_SLACK)
    return int(np.searchsorted(cumulative, target, side="left")) + 1


def _greedy_matching(
    network: WeightedNetwork, squared: np.ndarray, target: float
) -> tuple[np.ndarray, float]:
    edges = network.graph.edges
    masses = squared[edges[:, 0]] + squared[edges[:, 1]]
    used = np.zeros(network.graph.n, dtype=bool)
    chosen: list[int] = []
    captured = 0.0
    for e in np.argsort(-masses, kind="stable").tolist():
        if captured >= target or masses[e] == 0:
            break
        i, j = edges[e]
        if used[i] or used[j]:
            continue
        used[i] = used[j] = True
        chosen.append(e)
        captured += float(masses[e])
    return np.array(chosen, dtype=np.int64), captured


def localization_report(
    network: WeightedNetwork,
    f: np.ndarray,
    eps: float,
    *,
    stats: Sequence[ComponentStats] | None = None,
    heavy_threshold: float | None = None,
) -> LocalizationReport:
    """Support size, edge cover and participation of the eigenvector f.

    With `stats` and `heavy_threshold`, also counts the components whose S
    reaches the threshold.
    """
    if not 0 < eps < 1:
        msg = f"eps must lie in (0, 1), got {eps}"
        raise ValueError(msg)
    f = np.asarray(f, dtype=np.float64)
    squared = f * f
    total = float(squared.sum())
    edges = network.graph.edges
    top_edge_mass = float(np.max(squared[edges[:, 0]] + squared[edges[:, 1]]))

    disjoint = np.zeros(0, dtype=np.int64)
    disjoint_mass = 0.0
    if network.params.alpha < 2:  # noqa: PLR2004
        disjoint, disjoint_mass = _greedy_matching(
            network, squared, (1 - eps) ** 2 * total
        )

    heavy = None
    if stats is not None and heavy_threshold is not None:
        heavy = sum(row.S >= heavy_threshold for row in stats)

    ipr = float(np.sum(squared**2)) / (total * total)
    return LocalizationReport(
        min_support_size(f, eps),
        top_edge_mass,
        disjoint,
        disjoint_mass,
        heavy,
        ipr,
        1 / ipr,
    )


def shattering_bound(n: int, b: float) -> int:
    """floor(3 log n / b), the component edge cap at retention e**-b."""
    if not b > 0:
        msg = f"b must be positive, got {b}"
        raise ValueError(msg)
    return math.floor(3 * math.log(n) / b)


def shattering_union_bound(n: int, d: int, b: float, C: float = 1.0) -> float:  # noqa: N803
    """n * d**l * l**l * C**l * exp(-b l) with l one past the cap.

    Bounds the probability that some component has more edges than the cap.
    Values above one carry no information.
    """
    length = shattering_bound(n, b) + 1
    log_value = (
        math.log(n)
        + length * (math.log(d) + math.log(length) + math.log(C))
        - b * length
    )
    return math.exp(min(log_value, 700.0))


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def exact_checks(
    decomposition: Decomposition, top: EigenPair, seed: int = 0
) -> list[Check]:
    """Inequalities every instance satisfies up to solver residuals.

    The top eigenvalue dominates the largest weight; the light part's top
    eigenvalue is at most d * b**(1/alpha); and the top eigenvalue is at most
    that of X11 plus the norms of X12 and X2.
    """
    network = decomposition.network
    params = decomposition.params
    checks = []

    largest = network.max_abs_weight
    checks.append(
        Check(
            "lambda_dominates_max_weight",
            top.value >= largest - top.residual - _CHECK_SLACK,
            f"lambda1={top.value!r} max|W|={largest!r} residual={top.residual!r}",
        )
    )

    light = lambda_max(decomposition.matrix(X2), seed=seed).value
    cap = network.graph.d * params.threshold
    checks.append(
        Check(
            "light_part_bounded",
            light <= cap * (1 + _CHECK_SLACK) + _CHECK_SLACK,
            f"lambda1(X2)={light!r} d*b^(1/alpha)={cap!r}",
        )
    )

    forest = lambda_max(decomposition.matrix(X11), seed=seed).value
    excess = spectral_norm(decomposition.matrix(X12), seed=seed)
    light_norm = spectral_norm(decomposition.matrix(X2), seed=seed)
    bound = forest + excess + light_norm
    checks.append(
        Check(
            "weyl_triangle",
            top.value <= bound + _CHECK_SLACK * (1 + abs(bound)),
            f"lambda1={top.value!r} bound={bound!r}",
        )
    )
    for check in checks:
        if not check.passed:
            _logger.error("check %s failed: %s", check.name, check.detail)
    return checks


class FluctuationWindow(NamedTuple):
    low: float
    high: float
    tau_low: float
    tau_high: float


def _fluctuation_exponent(alpha: float) -> float:
    return (alpha + 1) / (2 * alpha + 1) if alpha > 1 else 2 / (alpha + 2)


def fluctuation_window(
    n: int,
    alpha: float,
    center: float,
    tau_low: float | None = None,
    tau_high: float | None = None,
) -> FluctuationWindow:
    """center * (log n)**(1/alpha) minus and plus (log n)**(tau/alpha).

    The default tau_low is the midpoint of (max(0, 1 - alpha), 1); the default
    tau_high is the midpoint of (t, 1) with t = (alpha+1)/(2 alpha+1) for
    alpha > 1 and 2/(alpha+2) otherwise.
    """
    if tau_low is None:
        tau_low = (max(0.0, 1 - alpha) + 1) / 2
    if tau_high is None:
        tau_high = (_fluctuation_exponent(alpha) + 1) / 2
    log_n = math.log(n)
    middle = center * log_n ** (1 / alpha)
    return FluctuationWindow(
        middle - log_n ** (tau_low / alpha),
        middle + log_n ** (tau_high / alpha),
        tau_low,
        tau_high,
    )


def lower_tail_threshold(
    n: int, alpha: float, delta: float, k_value: float | None = None
) -> float:
    """(1 - delta) times the leading order of the top eigenvalue.

    That is (log n)**(1/alpha) for alpha <= 1 and
    2**(1/alpha) * K * (log n)**(1/alpha) beyond, where K is the tree
    maximum at gamma = beta/2. K is known in closed form for alpha <= 2 and
    must be supplied above.
    """
    if not 0 < delta < 1:
        msg = f"delta must lie in (0, 1), got {delta}"
        raise ValueError(msg)
    scale = math.log(n) ** (1 / alpha)
    if alpha <= 1:
        return (1 - delta) * scale
    if k_value is None:
        if alpha > 2:  # noqa: PLR2004
            msg = "k_value is required for alpha > 2"
            raise ValueError(msg)
        k_value = kd_closed_form(gamma_from_alpha(alpha))
    return (1 - delta) * 2 ** (1 / alpha) * k_value * scale


def lln_center(d: int, alpha: float, depth: int = _DEFAULT_CENTER_DEPTH) -> float:
    """h(d, alpha) for alpha > 1 computed to `depth`; 1 for alpha <= 2."""
    if alpha <= 2:  # noqa: PLR2004
        return 1.0
    return h_d(d, alpha, L_max=depth).value


class TransitionTask(NamedTuple):
    n: int
    d: int
    alpha: float
    grid: int
    trial: int
    seed: int
    center: float
    with_norm: bool = False
    tol: float = 1e-10
    max_iter: int = 5000
    delta: float = _DEFAULT_LOWER_TAIL_DELTA


class TransitionRecord(NamedTuple):
    """One top-eigenvalue measurement on a fresh weighted network."""

    n: int
    d: int
    alpha: float
    grid: int
    trial: int
    seed: int
    lambda1: float
    residual: float
    converged: bool
    max_abs_weight: float
    ratio: float
    lambda_dominates_max_weight: bool
    center: float
    in_window: bool
    above_lower_tail: bool
    norm: float | None
    norm_ratio: float | None


def network_for_trial(n: int, d: int, alpha: float, seed: int) -> WeightedNetwork:
    """Graph and weights of one trial, from independent derived streams."""
    graph = generate_regular(n, d, derive_seed(seed, 0))
    return weigh(graph, WeibullParams.create(alpha), derive_seed(seed, 1))


def transition_trial(task: TransitionTask) -> TransitionRecord:
    network = network_for_trial(task.n, task.d, task.alpha, task.seed)
    matrix = SparseSym.from_network(network)
    top = lambda_max(matrix, task.tol, task.max_iter)
    scale = math.log(task.n) ** (1 / task.alpha)
    largest = network.max_abs_weight
    window = fluctuation_window(task.n, task.alpha, task.center)
    # Above alpha = 2 the center is 2**(1/alpha) * K.
    k_value = task.center * 2 ** (-1 / task.alpha) if task.alpha > 2 else None  # noqa: PLR2004
    lower_tail = lower_tail_threshold(task.n, task.alpha, task.delta, k_value)
    norm = spectral_norm(matrix, task.tol, task.max_iter) if task.with_norm else None
    return TransitionRecord(
        task.n,
        task.d,
        task.alpha,
        task.grid,
        task.trial,
        task.seed,
        top.value,
        top.residual,
        top.converged,
        largest,
        top.value / scale,
        top.value >= largest - top.residual,
        task.center,
        window.low <= top.value <= window.high,
        top.value >= lower_tail,
        norm,
        None if norm is None else norm / scale,
    )


def transition_tasks(  # noqa: PLR0913
    n_list: Sequence[int],
    d: int,
    alpha_list: Sequence[float],
    trials: int,
    seed: int,
    *,
    with_norm: bool = False,
) -> list[TransitionTask]:
    """Tasks in (n, alpha, trial) order; grid index g runs over (n, alpha)."""
    centers = {alpha: lln_center(d, alpha) for alpha in alpha_list}
    tasks = []
    for g, (n, alpha) in enumerate((n, a) for n in n_list for a in alpha_list):
        tasks.extend(
            TransitionTask(
                n, d, alpha, g, t, trial_seed(seed, g, t), centers[alpha], with_norm
            )
            for t in range(trials)
        )
    return tasks


def transition_experiment(  # noqa: PLR0913
    n_list: Sequence[int],
    d: int,
    alpha_list: Sequence[float],
    trials: int,
    seed: int,
    *,
    threads: int | None = None,
    with_norm: bool = False,
) -> list[TransitionRecord]:
    """lambda1 / (log n)**(1/alpha) over fresh networks per (n, alpha, trial)."""
    tasks = transition_tasks(n_list, d, alpha_list, trials, seed, with_norm=with_norm)
    records = run_ordered(transition_trial, tasks, threads)
    failed = [record for record in records if not record.lambda_dominates_max_weight]
    if failed:
        _logger.error("%d records violate lambda1 >= max|W|", len(failed))
    return records


class ShatteringTask(NamedTuple):
    n: int
    d: int
    b: float
    grid: int
    trial: int
    seed: int


class ShatteringRecord(NamedTuple):
    n: int
    d: int
    b: float
    grid: int
    trial: int
    seed: int
    max_component_edges: int
    bound: int
    exceeded: bool
    heavy_edges: int


def shattering_trial(task: ShatteringTask) -> ShatteringRecord:
    # Retention is exp(-b) for every alpha; unit exponentials are used.
    network = network_for_trial(task.n, task.d, 1.0, task.seed)
    decomposition = Decomposition(network, DecompositionParams.create(1.0, task.b))
    largest = decomposition.max_component_edges()
    bound = shattering_bound(task.n, task.b)
    return ShatteringRecord(
        task.n,
        task.d,
        task.b,
        task.grid,
        task.trial,
        task.seed,
        largest,
        bound,
        largest > bound,
        int(decomposition.heavy.sum()),
    )


class ShatteringResult(NamedTuple):
    bound: int
    union_bound: float
    records: list[ShatteringRecord]

    @property
    def exceedance_frequency(self) -> float:
        return sum(record.exceeded for record in self.records) / len(self.records)


def shattering_experiment(  # noqa: PLR0913
    n: int,
    d: int,
    b: float,
    trials: int,
    seed: int,
    *,
    threads: int | None = None,
) -> ShatteringResult:
    """Largest heavy component per trial against floor(3 log n / b)."""
    bound = shattering_bound(n, b)
    tasks = [
        ShatteringTask(n, d, b, 0, t, trial_seed(seed, 0, t)) for t in range(trials)
    ]
    records = run_ordered(shattering_trial, tasks, threads)
    result = ShatteringResult(bound, shattering_union_bound(n, d, b), records)
    _logger.info(
        "n=%d b=%g: cap %d exceeded in %.3g of %d trials",
        n,
        b,
        bound,
        result.exceedance_frequency,
        trials,
    )
    return result
