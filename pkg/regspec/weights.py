"""Symmetric Weibull edge weights and the conditioned Weibull sum tail.

The weight law is exact: P(|W| >= t) = exp(-t**alpha) for every t >= 0, with
an independent fair sign. Hence |W|**alpha is a unit exponential, and
conditioning on |W| > b**(1/alpha) shifts that exponential by b.
"""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import logging
import math
from typing import NamedTuple

import numpy as np
from scipy import sparse, stats

from regspec.regular_graph import InvalidParametersError, RegularGraph
from regspec.rng import make_rng

_logger = logging.getLogger().getChild(__name__)

MIN_TAIL_TRIALS = 10_000
_TAIL_CONFIDENCE = 0.99
_TAIL_CHUNK = 1_000_000


class WeibullParams(NamedTuple):
    alpha: float

    @classmethod
    def create(cls, alpha: float) -> WeibullParams:
        if not alpha > 0 or not math.isfinite(alpha):
            msg = f"Weibull shape must be a positive real, got {alpha}"
            raise ValueError(msg)
        return cls(float(alpha))


def weibull_from_uniform(
    u: float | np.ndarray,
    sign: float | np.ndarray,
    alpha: float,
    b: float = 0.0,
) -> float | np.ndarray:
    """Inverse transform: sign * (b - log u)**(1/alpha) for u in (0, 1]."""
    return sign * np.power(b - np.log(u), 1.0 / alpha)


def _uniform_and_sign(
    size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    # 1 - U lies in (0, 1], so the logarithm is finite.
    u = 1.0 - rng.random(size)
    sign = np.where(rng.random(size) < 0.5, 1.0, -1.0)  # noqa: PLR2004
    return u, sign


def sample_weights(
    params: WeibullParams, size: int, rng: np.random.Generator
) -> np.ndarray:
    """`size` independent signed Weibull weights."""
    u, sign = _uniform_and_sign(size, rng)
    return weibull_from_uniform(u, sign, params.alpha)


def sample_conditioned_many(
    params: WeibullParams, b: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Weights conditioned on |W|**alpha >= b."""
    if b < 0:
        msg = f"conditioning level must be nonnegative, got {b}"
        raise ValueError(msg)
    u, sign = _uniform_and_sign(size, rng)
    return weibull_from_uniform(u, sign, params.alpha, b)


def sample_weight(params: WeibullParams, rng: np.random.Generator) -> float:
    return float(sample_weights(params, 1, rng)[0])


def sample_conditioned(
    params: WeibullParams, b: float, rng: np.random.Generator
) -> float:
    return float(sample_conditioned_many(params, b, 1, rng)[0])


class WeightedNetwork:
    """A regular graph with one real weight per canonical edge.

    The implied matrix X is symmetric with zero diagonal and X_ij = W_e for
    the edge e = (i, j).

    Attributes
    ----------
      graph: The underlying regular graph.
      weights: Read-only float array indexed by edge id.
      params: Weight law the weights were drawn from.
      seed: Seed the weights were drawn with, if any.

    """

    def __init__(
        self,
        graph: RegularGraph,
        weights: np.ndarray,
        params: WeibullParams,
        seed: int | None = None,
    ) -> None:
        weights = np.array(weights, dtype=np.float64)
        if weights.shape != (graph.edge_count,):
            msg = f"expected {graph.edge_count} weights, got {weights.shape}"
            raise InvalidParametersError(msg)
        weights.flags.writeable = False
        self.graph = graph
        self.weights = weights
        self.params = params
        self.seed = seed

    @classmethod
    def unit(cls, graph: RegularGraph, alpha: float = 1.0) -> WeightedNetwork:
        """All weights equal to one: the plain adjacency matrix."""
        return cls(graph, np.ones(graph.edge_count), WeibullParams.create(alpha))

    @property
    def max_abs_weight(self) -> float:
        return float(np.abs(self.weights).max()) if len(self.weights) else 0.0

    def to_sparse(self, edge_mask: np.ndarray | None = None) -> sparse.csr_matrix:
        """The (masked) matrix X in CSR form without stored zeros."""
        keep = np.ones(len(self.weights), dtype=bool)
        if edge_mask is not None:
            keep &= np.asarray(edge_mask, dtype=bool)
        keep &= self.weights != 0
        edges, values = self.graph.edges[keep], self.weights[keep]
        rows = np.concatenate((edges[:, 0], edges[:, 1]))
        cols = np.concatenate((edges[:, 1], edges[:, 0]))
        data = np.concatenate((values, values))
        n = self.graph.n
        return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


def weigh(graph: RegularGraph, params: WeibullParams, seed: int) -> WeightedNetwork:
    """Attach one i.i.d. weight per canonical edge, in edge-id order."""
    weights = sample_weights(params, graph.edge_count, make_rng(seed))
    return WeightedNetwork(graph, weights, params, seed)


def write_network(path: str, network: WeightedNetwork) -> None:
    """Header `n d alpha seed`, then `i j w` per edge with round-trip floats."""
    graph = network.graph
    seed = "-" if network.seed is None else str(network.seed)
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(f"{graph.n} {graph.d} {network.params.alpha!r} {seed}\n")
        fp.writelines(
            f"{i} {j} {w!r}\n"
            for (i, j), w in zip(
                graph.edges.tolist(), network.weights.tolist(), strict=True
            )
        )


def read_network(path: str) -> WeightedNetwork:
    with open(path, encoding="utf-8") as fp:
        header = fp.readline().split()
        if len(header) != 4:  # noqa: PLR2004
            msg = f"{path}: expected header `n d alpha seed`"
            raise InvalidParametersError(msg)
        rows = [line.split() for line in fp if line.strip()]
    n, d, alpha = int(header[0]), int(header[1]), float(header[2])
    seed = None if header[3] == "-" else int(header[3])
    edges = np.array([(int(i), int(j)) for i, j, _ in rows], dtype=np.int64)
    weights = np.array([float(w) for _, _, w in rows])
    graph = RegularGraph(n, d, edges.reshape(-1, 2), seed=seed)
    return WeightedNetwork(graph, weights, WeibullParams.create(alpha), seed)


class TailBoundQuery(NamedTuple):
    """Sum of m conditioned summands exceeding L, tail constant C."""

    m: int
    L: float
    b: float
    C: float = 1.0

    @classmethod
    def create(cls, m: int, L: float, b: float, C: float = 1.0) -> TailBoundQuery:  # noqa: N803
        if m < 1:
            msg = f"need at least one summand, got m={m}"
            raise ValueError(msg)
        if not L > m:
            msg = f"threshold L must exceed m, got L={L}, m={m}"
            raise ValueError(msg)
        if not b > 1:
            msg = f"conditioning level b must exceed 1, got b={b}"
            raise ValueError(msg)
        if not C >= 1:
            msg = f"tail constant C must be at least 1, got C={C}"
            raise ValueError(msg)
        return cls(int(m), float(L), float(b), float(C))


def weibull_sum_bound(query: TailBoundQuery) -> float:
    """(C L / m)**m * exp(-L + m + m b)."""
    m, L, b, C = query  # noqa: N806
    if not L > m:
        msg = f"threshold L must exceed m, got L={L}, m={m}"
        raise ValueError(msg)
    return math.exp(m * math.log(C * L / m) - L + m + m * b)


def conditioned_tail_exact(L: float, b: float) -> float:  # noqa: N803
    """P(|Y|**alpha >= L) for one summand conditioned at level b."""
    return 1.0 if L <= b else math.exp(-(L - b))


class TailEstimate(NamedTuple):
    estimate: float
    lower: float
    upper: float
    hits: int
    trials: int


def wilson_interval(
    hits: int, trials: int, confidence: float = _TAIL_CONFIDENCE
) -> tuple[float, float]:
    """Wilson score interval of a binomial proportion."""
    z = float(stats.norm.ppf(0.5 + confidence / 2))
    p = hits / trials
    denominator = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denominator
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    half /= denominator
    return max(0.0, center - half), min(1.0, center + half)


def mc_sum_tail(  # noqa: PLR0913,PLR0917
    alpha: float,
    m: int,
    L: float,  # noqa: N803
    b: float,
    trials: int,
    seed: int,
) -> TailEstimate:
    """Monte Carlo estimate of P(sum_{i<=m} |Y_i|**alpha >= L).

    The Y_i are independent weights conditioned on |Y_i|**alpha >= b. The
    interval is the 99% Wilson interval. Below m*b the event is certain.
    """
    if trials < MIN_TAIL_TRIALS:
        msg = f"need at least {MIN_TAIL_TRIALS} trials, got {trials}"
        raise ValueError(msg)
    params = WeibullParams.create(alpha)
    if L <= m * b:
        hits = trials
    else:
        rng = make_rng(seed)
        hits = 0
        for start in range(0, trials, _TAIL_CHUNK):
            rows = min(_TAIL_CHUNK, trials - start)
            sample = sample_conditioned_many(params, b, rows * m, rng)
            sums = np.power(np.abs(sample), alpha).reshape(rows, m).sum(axis=1)
            hits += int(np.count_nonzero(sums >= L))
    lower, upper = wilson_interval(hits, trials)
    _logger.debug("m=%d L=%g b=%g: %d/%d hits", m, L, b, hits, trials)
    return TailEstimate(hits / trials, lower, upper, hits, trials)
