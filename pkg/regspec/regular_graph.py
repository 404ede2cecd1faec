"""Uniform random d-regular graphs and their neighborhood structure."""

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
from scipy import sparse

from regspec.rng import make_rng
from regspec.union_find import UnionFind

if TYPE_CHECKING:
    from collections.abc import Iterator

_logger = logging.getLogger().getChild(__name__)

_DEFAULT_MAX_RETRIES = 10_000
_CENSUS_CHUNK = 4096


class InvalidParametersError(ValueError):
    """Graph parameters admit no simple d-regular graph."""


class RetryBudgetExceededError(RuntimeError):
    """The pairing model kept producing loops or multi-edges."""


class VertexOutOfRangeError(ValueError):
    pass


class MaskLengthError(ValueError):
    pass


class RegularGraph:
    """A simple d-regular graph with a canonical undirected edge index.

    Attributes
    ----------
      n: Number of vertices.
      d: Degree of every vertex.
      edges: (n*d/2, 2) int64 array of edges (i, j) with i < j, sorted
        lexicographically; row e is the edge with id e.
      neighbors: (n, d) int64 array; row v holds the sorted neighbors of v.
      neighbor_edges: (n, d) int64 array of the edge ids matching `neighbors`.
      seed: Seed the graph was generated from, if any.
      attempts: Number of pairings drawn before the graph was accepted.

    All arrays are read-only; the graph is immutable after construction.

    """

    def __init__(
        self,
        n: int,
        d: int,
        edges: np.ndarray,
        seed: int | None = None,
        attempts: int = 1,
    ) -> None:
        self.n = int(n)
        self.d = int(d)
        self.seed = seed
        self.attempts = attempts
        self.edges = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)

        self._validate_edges()
        rows = np.concatenate((self.edges[:, 0], self.edges[:, 1]))
        cols = np.concatenate((self.edges[:, 1], self.edges[:, 0]))
        ids = np.tile(np.arange(len(self.edges), dtype=np.int64), 2)
        order = np.lexsort((cols, rows))
        self.neighbors = cols[order].reshape(self.n, self.d)
        self.neighbor_edges = ids[order].reshape(self.n, self.d)

        for array in (self.edges, self.neighbors, self.neighbor_edges):
            array.flags.writeable = False

    @classmethod
    def from_edges(
        cls,
        n: int,
        d: int,
        edges: np.ndarray | list[tuple[int, int]],
        seed: int | None = None,
    ) -> RegularGraph:
        """Build a graph from undirected edges given in any order."""
        array = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        lo = np.minimum(array[:, 0], array[:, 1])
        hi = np.maximum(array[:, 0], array[:, 1])
        order = np.lexsort((hi, lo))
        return cls(n, d, np.stack((lo[order], hi[order]), axis=1), seed=seed)

    def _validate_edges(self) -> None:
        n, d, edges = self.n, self.d, self.edges
        if n <= 0 or d < 1:
            msg = f"need n > 0 and d >= 1, got n={n}, d={d}"
            raise InvalidParametersError(msg)
        if (n * d) % 2 != 0:
            msg = f"n*d must be even, got n={n}, d={d}"
            raise InvalidParametersError(msg)
        if len(edges) != n * d // 2:
            msg = f"expected {n * d // 2} edges, got {len(edges)}"
            raise InvalidParametersError(msg)
        if len(edges) == 0:
            return
        if edges.min() < 0 or edges.max() >= n:
            msg = "edge endpoint out of range"
            raise InvalidParametersError(msg)
        if np.any(edges[:, 0] >= edges[:, 1]):
            msg = "edges must satisfy i < j (no self-loops)"
            raise InvalidParametersError(msg)
        keys = edges[:, 0] * n + edges[:, 1]
        if np.any(np.diff(keys) <= 0):
            msg = "edges must be unique and in lexicographic order"
            raise InvalidParametersError(msg)
        degrees = np.bincount(edges.ravel(), minlength=n)
        if np.any(degrees != d):
            msg = f"graph is not {d}-regular"
            raise InvalidParametersError(msg)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self, edge_mask: np.ndarray | None = None) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix of the (masked) graph."""
        edges = self.edges if edge_mask is None else self.edges[edge_mask]
        rows = np.concatenate((edges[:, 0], edges[:, 1]))
        cols = np.concatenate((edges[:, 1], edges[:, 0]))
        data = np.ones(len(rows))
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def masked_neighbors(
        self, v: int, edge_mask: np.ndarray | None = None
    ) -> Iterator[tuple[int, int]]:
        """Yields (neighbor, edge id) pairs of `v` whose edge is in the mask."""
        for w, e in zip(self.neighbors[v], self.neighbor_edges[v], strict=True):
            if edge_mask is None or edge_mask[e]:
                yield int(w), int(e)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RegularGraph)
            and self.n == other.n
            and self.d == other.d
            and np.array_equal(self.edges, other.edges)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.d, self.edges.tobytes()))

    def __repr__(self) -> str:
        return f"RegularGraph(n={self.n}, d={self.d}, seed={self.seed})"


def check_parameters(n: int, d: int) -> None:
    """Raise if no simple d-regular graph on n vertices exists."""
    if n <= 0 or d < 1:
        msg = f"need n > 0 and d >= 1, got n={n}, d={d}"
        raise InvalidParametersError(msg)
    if (n * d) % 2 != 0:
        msg = f"n*d must be even, got n={n}, d={d}"
        raise InvalidParametersError(msg)
    if n <= d:
        msg = f"need n > d, got n={n}, d={d}"
        raise InvalidParametersError(msg)


def pairing_attempt(n: int, d: int, rng: np.random.Generator) -> np.ndarray | None:
    """Pair the n*d half-edges uniformly at random once.

    Returns the canonical edge array, or None if the pairing has a loop or a
    repeated edge.
    """
    stubs = rng.permutation(np.repeat(np.arange(n, dtype=np.int64), d))
    first, second = stubs[0::2], stubs[1::2]
    if np.any(first == second):
        return None
    lo = np.minimum(first, second)
    hi = np.maximum(first, second)
    keys = np.sort(lo * n + hi)
    if np.any(keys[1:] == keys[:-1]):
        return None
    return np.stack((keys // n, keys % n), axis=1)


def generate_regular(
    n: int,
    d: int,
    seed: int,
    max_retries: int = _DEFAULT_MAX_RETRIES,
) -> RegularGraph:
    """Sample a uniform simple d-regular graph on n vertices.

    The configuration model pairs the half-edges uniformly and restarts from
    scratch on any loop or multi-edge, so the accepted graph is uniform over
    simple d-regular graphs.

    Args:
    ----
      n: Number of vertices.
      d: Degree.
      seed: 64-bit seed; the graph is a function of (n, d, seed).
      max_retries: Number of pairings drawn before giving up.

    Returns:
    -------
      The generated graph, with the attempt count recorded.

    """
    check_parameters(n, d)
    rng = make_rng(seed)
    for attempt in range(1, max_retries + 1):
        edges = pairing_attempt(n, d, rng)
        if edges is not None:
            _logger.debug("n=%d d=%d accepted after %d pairings", n, d, attempt)
            return RegularGraph(n, d, edges, seed=seed, attempts=attempt)
    msg = f"no simple {d}-regular pairing on {n} vertices in {max_retries} tries"
    raise RetryBudgetExceededError(msg)


def tree_ball_size(d: int, radius: int) -> int:
    """Vertex count of a radius-R ball in the infinite d-regular tree."""
    if d == 2:  # noqa: PLR2004
        return 1 + 2 * radius
    if d == 1:
        return 1 if radius == 0 else 2
    return 1 + d * ((d - 1) ** radius - 1) // (d - 2)


class BallReport(NamedTuple):
    root: int
    radius: int
    vertex_count: int
    edge_count: int

    @property
    def excess(self) -> int:
        return self.edge_count - self.vertex_count + 1

    @property
    def contains_cycle(self) -> bool:
        return self.excess >= 1


class Ball(NamedTuple):
    """A ball report with the induced subgraph it describes."""

    report: BallReport
    vertices: np.ndarray
    edges: np.ndarray


def ball(
    graph: RegularGraph,
    v: int,
    radius: int,
    edge_mask: np.ndarray | None = None,
) -> Ball:
    """Breadth-first ball of `radius` around `v` and its induced subgraph."""
    if not 0 <= v < graph.n:
        msg = f"vertex {v} out of range [0, {graph.n})"
        raise VertexOutOfRangeError(msg)
    if radius < 0:
        msg = f"radius must be nonnegative, got {radius}"
        raise ValueError(msg)
    _check_mask(graph, edge_mask)

    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        if dist[u] == radius:
            continue
        for w, _ in graph.masked_neighbors(u, edge_mask):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)

    vertices = np.array(sorted(dist), dtype=np.int64)
    edge_ids = {
        e
        for u in dist
        for w, e in graph.masked_neighbors(u, edge_mask)
        if w in dist
    }
    edges = np.array(sorted(edge_ids), dtype=np.int64)
    report = BallReport(v, radius, len(vertices), len(edges))
    if graph.d >= 3:  # noqa: PLR2004
        assert report.vertex_count <= tree_ball_size(graph.d, radius)
    return Ball(report, vertices, edges)


class TreeLikenessCensus(NamedTuple):
    """Cycle statistics of all radius-R balls.

    `cyclic_cap` is (d-1)^(4R); `within_cap` says whether the number of
    vertices whose ball holds a cycle stays below it.
    """

    radius: int
    max_excess: int
    cyclic_vertex_count: int
    cyclic_cap: int

    @property
    def within_cap(self) -> bool:
        return self.cyclic_vertex_count <= self.cyclic_cap


def ball_excesses(
    graph: RegularGraph,
    radius: int,
    edge_mask: np.ndarray | None = None,
) -> np.ndarray:
    """Excess of the radius-R ball around every vertex.

    Ball membership is the sparsity pattern of (I + A)^R, built in row chunks;
    the edge count of the ball around v is half of sum_w (B A)_vw B_vw.
    """
    adjacency = graph.adjacency(edge_mask)
    excesses = np.empty(graph.n, dtype=np.int64)
    for start in range(0, graph.n, _CENSUS_CHUNK):
        roots = np.arange(start, min(start + _CENSUS_CHUNK, graph.n))
        members = sparse.csr_matrix(
            (np.ones(len(roots)), (np.arange(len(roots)), roots)),
            shape=(len(roots), graph.n),
        )
        for _ in range(radius):
            members = members + members @ adjacency
            members.data[:] = 1.0
        vertex_counts = members.getnnz(axis=1)
        inner = (members @ adjacency).multiply(members).sum(axis=1)
        edge_counts = np.rint(np.asarray(inner).ravel() / 2).astype(np.int64)
        excesses[roots] = edge_counts - vertex_counts + 1
    return excesses


def census(
    graph: RegularGraph,
    radius: int,
    edge_mask: np.ndarray | None = None,
) -> TreeLikenessCensus:
    """Exact max excess and cyclic-vertex count over all radius-R balls."""
    if radius < 1:
        msg = f"census radius must be at least 1, got {radius}"
        raise ValueError(msg)
    _check_mask(graph, edge_mask)
    excesses = ball_excesses(graph, radius, edge_mask)
    result = TreeLikenessCensus(
        radius=radius,
        max_excess=int(excesses.max()),
        cyclic_vertex_count=int(np.count_nonzero(excesses >= 1)),
        cyclic_cap=max(graph.d - 1, 1) ** (4 * radius),
    )
    _logger.debug("census %s", result)
    return result


def default_census_radius(n: int, d: int) -> int:
    """floor(0.2 * log_{d-1} n), at least 1."""
    if d < 3:  # noqa: PLR2004
        msg = f"default census radius needs d >= 3, got {d}"
        raise InvalidParametersError(msg)
    return max(1, math.floor(0.2 * math.log(n) / math.log(d - 1)))


class Components:
    """Connected components of a masked subgraph.

    Components are numbered in the order of their lowest vertex id. Vertex
    and edge lists are stored grouped by component, ascending within each.

    Attributes
    ----------
      labels: Component index of every vertex.
      count: Number of components, isolated vertices included.
      vertex_counts: Vertices per component.
      edge_counts: Masked edges per component.

    """

    def __init__(
        self,
        labels: np.ndarray,
        edge_ids: np.ndarray,
        edge_labels: np.ndarray,
    ) -> None:
        self.labels = labels
        self.count = int(labels.max()) + 1 if len(labels) else 0
        self.vertex_counts = np.bincount(labels, minlength=self.count)
        self.edge_counts = np.bincount(edge_labels, minlength=self.count)

        self._vertex_order = np.argsort(labels, kind="stable")
        self._vertex_offsets = np.concatenate(([0], np.cumsum(self.vertex_counts)))
        order = np.argsort(edge_labels, kind="stable")
        self._edge_order = edge_ids[order]
        self._edge_offsets = np.concatenate(([0], np.cumsum(self.edge_counts)))

    def vertices(self, k: int) -> np.ndarray:
        lo, hi = self._vertex_offsets[k], self._vertex_offsets[k + 1]
        return self._vertex_order[lo:hi]

    def edges(self, k: int) -> np.ndarray:
        lo, hi = self._edge_offsets[k], self._edge_offsets[k + 1]
        return self._edge_order[lo:hi]

    def nontrivial(self) -> np.ndarray:
        """Indices of components holding at least one edge."""
        return np.flatnonzero(self.edge_counts > 0)

    def __len__(self) -> int:
        return self.count


def _check_mask(graph: RegularGraph, edge_mask: np.ndarray | None) -> None:
    if edge_mask is not None and len(edge_mask) != graph.edge_count:
        msg = f"mask has length {len(edge_mask)}, graph has {graph.edge_count} edges"
        raise MaskLengthError(msg)


def components(graph: RegularGraph, edge_mask: np.ndarray) -> Components:
    """Union-find over the masked edges."""
    edge_mask = np.asarray(edge_mask, dtype=bool)
    _check_mask(graph, edge_mask)
    union_find = UnionFind(graph.n)
    edge_ids = np.flatnonzero(edge_mask)
    for i, j in graph.edges[edge_ids].tolist():
        union_find.union(i, j)

    roots = union_find.roots()
    _, first_seen, inverse = np.unique(roots, return_index=True, return_inverse=True)
    remap = np.empty(len(first_seen), dtype=np.int64)
    remap[np.argsort(first_seen, kind="stable")] = np.arange(len(first_seen))
    labels = remap[inverse]
    edge_labels = labels[graph.edges[edge_ids, 0]]
    return Components(labels, edge_ids, edge_labels)


def write_graph(path: str, graph: RegularGraph) -> None:
    """Header `n d seed`, then one `i j` line per edge in canonical order."""
    seed = "-" if graph.seed is None else str(graph.seed)
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(f"{graph.n} {graph.d} {seed}\n")
        fp.writelines(f"{i} {j}\n" for i, j in graph.edges.tolist())


def read_graph(path: str) -> RegularGraph:
    """Parse and validate a graph file written by `write_graph`."""
    with open(path, encoding="utf-8") as fp:
        header = fp.readline().split()
        if len(header) != 3:  # noqa: PLR2004
            msg = f"{path}: expected header `n d seed`"
            raise InvalidParametersError(msg)
        n, d = int(header[0]), int(header[1])
        seed = None if header[2] == "-" else int(header[2])
        rows = [line.split() for line in fp if line.strip()]
    edges = np.array([(int(i), int(j)) for i, j in rows], dtype=np.int64)
    return RegularGraph(n, d, edges.reshape(-1, 2), seed=seed)
