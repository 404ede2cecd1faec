"""Unit tests for regspec.decomposition."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import math

import numpy as np
import pytest

from regspec.decomposition import (
    X2,
    X11,
    X12,
    Decomposition,
    DecompositionParams,
    ShatteringTask,
    component_stats,
    decompose,
    exact_checks,
    fluctuation_window,
    isolated_mass,
    localization_report,
    lower_tail_threshold,
    min_support_size,
    network_for_trial,
    shattering_bound,
    shattering_trial,
    shattering_union_bound,
    transition_experiment,
    truncate,
)
from regspec.regular_graph import RegularGraph, components
from regspec.rng import make_rng
from regspec.spectral import SparseSym, lambda_max
from regspec.union_find import UnionFind
from regspec.weights import WeibullParams, WeightedNetwork


def _prism(k: int) -> RegularGraph:
    """Two k-cycles joined by a perfect matching."""
    edges = [(i, (i + 1) % k) for i in range(k)]
    edges += [(k + i, k + (i + 1) % k) for i in range(k)]
    edges += [(i, k + i) for i in range(k)]
    return RegularGraph.from_edges(2 * k, 3, edges)


def _network(
    graph: RegularGraph, heavy_edges: set[tuple[int, int]], alpha: float = 1.5
) -> WeightedNetwork:
    weights = [
        5.0 if tuple(edge) in heavy_edges else 0.1 for edge in graph.edges.tolist()
    ]
    return WeightedNetwork(graph, np.array(weights), WeibullParams.create(alpha))


def test_truncation_extremes() -> None:
    network = network_for_trial(200, 3, 1.0, 0)
    heavy, light = truncate(network, DecompositionParams.create(1.0, 1e-12))
    assert heavy.all()
    assert not light.any()
    heavy, light = truncate(network, DecompositionParams.create(1.0, 1e6))
    assert not heavy.any()
    assert light.all()


@pytest.mark.parametrize("alpha", [0.5, 2.0])
def test_kept_fraction_matches_exact_tail(alpha: float) -> None:
    b = 1.5
    network = network_for_trial(10**5, 3, alpha, 4)
    heavy, _ = truncate(network, DecompositionParams.create(alpha, b))
    m = len(heavy)
    p = math.exp(-b)
    # Two comparisons share this bound.
    assert abs(heavy.mean() - p) <= 4 * math.sqrt(p * (1 - p) / m)


@pytest.mark.parametrize("seed", range(5))
def test_masks_partition_edges_and_forest_is_acyclic(seed: int) -> None:
    network = network_for_trial(2000, 3, 1.0, seed)
    decomposition = decompose(network, DecompositionParams.create(1.0, 0.7))
    masks = np.stack(
        [decomposition.tree, decomposition.excess, decomposition.light]
    ).astype(int)
    assert np.all(masks.sum(axis=0) == 1)
    assert np.array_equal(decomposition.part == X11, decomposition.tree)
    assert np.array_equal(decomposition.part == X12, decomposition.excess)
    assert np.array_equal(decomposition.part == X2, decomposition.light)

    parts = decomposition.components
    for k in parts.nontrivial().tolist():
        assert len(decomposition.tree_edges(k)) == parts.vertex_counts[k] - 1
        assert len(decomposition.excess_edges(k)) == decomposition.excess_counts[k]
    forest = components(network.graph, decomposition.tree)
    assert np.all(forest.edge_counts == forest.vertex_counts - 1)


@pytest.mark.parametrize("seed", range(5))
def test_excess_matches_cycle_space_rank(seed: int) -> None:
    network = network_for_trial(300, 3, 1.0, seed)
    decomposition = decompose(network, DecompositionParams.create(1.0, 0.3))
    union_find = UnionFind(network.graph.n)
    cycle_rank = sum(
        not union_find.union(i, j)
        for i, j in network.graph.edges[decomposition.heavy].tolist()
    )
    assert int(decomposition.excess.sum()) == cycle_rank
    assert int(decomposition.excess_counts.sum()) == cycle_rank


def test_tree_and_single_cycle_components() -> None:
    graph = _prism(8)
    cycle = {(i, (i + 1) % 8) if i < 7 else (0, 7) for i in range(8)}
    params = DecompositionParams.create(1.5, 1.0)

    with_cycle = decompose(_network(graph, cycle), params)
    assert with_cycle.excess_counts.max() == 1
    assert int(with_cycle.excess.sum()) == 1

    path = cycle - {(0, 7)}
    as_tree = decompose(_network(graph, path), params)
    assert as_tree.excess_counts.max() == 0
    assert as_tree.tree.sum() == 7


def test_spanning_tree_grows_from_lowest_vertex() -> None:
    graph = _prism(6)
    cycle = {(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)}
    params = DecompositionParams.create(1.5, 1.0)
    decomposition = decompose(_network(graph, cycle), params)
    excess = graph.edges[decomposition.excess].tolist()
    # Breadth first from 0 reaches 3 through 2 first; the edge (3, 4) closes the cycle.
    assert excess == [[3, 4]]


def test_single_edge_component_stats() -> None:
    graph = _prism(6)
    network = _network(graph, {(0, 1)}, alpha=1.5)
    decomposition = decompose(network, DecompositionParams.create(1.5, 1.0))
    f = np.zeros(graph.n)
    f[[0, 1]] = 1 / math.sqrt(2)
    (row,) = component_stats(network, decomposition, f)
    beta = 3.0
    assert row.S == pytest.approx(5.0)
    assert row.x == pytest.approx(1.0)
    assert row.M == pytest.approx(1.0)
    assert row.F == pytest.approx(2 ** (1 / beta) / 2)
    assert row.rayleigh == pytest.approx(5.0)
    assert row.rayleigh <= row.certificate * (1 + 1e-12)
    assert isolated_mass(decomposition, f) == pytest.approx(0.0)


def test_component_away_from_support() -> None:
    graph = _prism(6)
    network = _network(graph, {(6, 7), (7, 8)})
    decomposition = decompose(network, DecompositionParams.create(1.5, 1.0))
    f = np.zeros(graph.n)
    f[0] = 1.0
    (row,) = component_stats(network, decomposition, f)
    assert (row.x, row.F, row.M) == (0.0, 0.0, 0.0)
    assert row.vertex_count == 3
    assert isolated_mass(decomposition, f) == pytest.approx(1.0)


def test_light_tail_has_no_hoelder_functional() -> None:
    graph = _prism(6)
    network = _network(graph, {(0, 1)}, alpha=1.0)
    decomposition = decompose(network, DecompositionParams.create(1.0, 1.0))
    (row,) = component_stats(network, decomposition, np.full(graph.n, graph.n**-0.5))
    assert row.F is None
    assert row.certificate is None


@pytest.mark.parametrize(("alpha", "seed"), [(1.5, 0), (3.0, 1), (1.2, 2)])
def test_mass_partition_and_hoelder_certificate(alpha: float, seed: int) -> None:
    network = network_for_trial(800, 3, alpha, seed)
    params = DecompositionParams.from_schedule(800, alpha)
    decomposition = decompose(network, params)
    f = lambda_max(SparseSym.from_network(network)).vector
    stats = component_stats(network, decomposition, f)
    total = sum(row.x for row in stats) + isolated_mass(decomposition, f)
    assert total == pytest.approx(1.0, abs=1e-10)
    assert [row.S for row in stats] == sorted((row.S for row in stats), reverse=True)
    for row in stats:
        assert abs(row.rayleigh) <= row.certificate * (1 + 1e-12)
        tree_edges = row.vertex_count - 1
        assert row.S >= params.threshold * tree_edges ** (1 / alpha) * (1 - 1e-12)


def test_schedule_parameters() -> None:
    n = 10**5
    log_n = math.log(n)
    heavy = DecompositionParams.from_schedule(n, 1.5)
    assert heavy.b == pytest.approx(log_n ** (1.5 / 4))
    assert heavy.a == pytest.approx(log_n ** (2.5 / 4 + 0.05))
    assert heavy.a_tilde == heavy.a
    light = DecompositionParams.from_schedule(n, 3.0, kappa=0.1)
    assert light.a_tilde == pytest.approx(log_n)
    small = DecompositionParams.from_schedule(n, 0.5)
    assert small.b == pytest.approx(log_n ** (0.5 / 2.5))
    assert small.a == pytest.approx(log_n ** (2 / 2.5 + 0.05))
    assert DecompositionParams.create(1.0, 2.0).a_tilde is None
    with pytest.raises(ValueError, match="truncation"):
        DecompositionParams.create(1.0, 0.0)


def test_min_support_examples() -> None:
    assert min_support_size(np.full(100, 0.1), 0.1) == 81
    assert min_support_size(np.eye(10)[3], 0.5) == 1
    two = np.zeros(10)
    two[[2, 7]] = 1 / math.sqrt(2)
    assert min_support_size(two, 0.1) == 2


def test_min_support_is_monotone_in_eps() -> None:
    f = np.abs(make_rng(0).standard_normal(500))
    f /= np.linalg.norm(f)
    sizes = [min_support_size(f, eps) for eps in (0.01, 0.05, 0.1, 0.3, 0.6)]
    assert sizes == sorted(sizes, reverse=True)


def test_localization_report_on_uniform_vector() -> None:
    network = network_for_trial(100, 3, 1.0, 0)
    report = localization_report(network, np.full(100, 0.1), 0.1)
    assert report.min_support_size == 81
    assert report.ipr == pytest.approx(1 / 100)
    assert report.participation == pytest.approx(100)
    assert report.top_edge_mass == pytest.approx(0.02)
    endpoints = network.graph.edges[report.disjoint_edges].ravel()
    assert len(set(endpoints.tolist())) == len(endpoints)
    assert report.disjoint_mass == pytest.approx(0.02 * len(report.disjoint_edges))


def test_localization_report_on_localized_vector() -> None:
    network = network_for_trial(1000, 3, 0.5, 2)
    decomposition = decompose(network, DecompositionParams.create(0.5, 2.0))
    f = lambda_max(SparseSym.from_network(network)).vector
    stats = component_stats(network, decomposition, f)
    report = localization_report(network, f, 0.1, stats=stats, heavy_threshold=0.0)
    assert report.heavy_component_count == len(stats)
    assert report.disjoint_mass <= 1 + 1e-12
    endpoints = network.graph.edges[report.disjoint_edges].ravel()
    assert len(set(endpoints.tolist())) == len(endpoints)
    assert report.min_support_size <= network.graph.n


def test_no_edge_cover_for_light_tails() -> None:
    network = network_for_trial(100, 3, 4.0, 0)
    report = localization_report(network, np.full(100, 0.1), 0.1)
    assert len(report.disjoint_edges) == 0
    assert report.heavy_component_count is None


def test_localization_eps_range() -> None:
    network = network_for_trial(100, 3, 1.0, 0)
    with pytest.raises(ValueError, match="eps"):
        localization_report(network, np.full(100, 0.1), 1.0)


def test_shattering_bound_value() -> None:
    n = 10**5
    assert shattering_bound(n, math.log(n) / 3) == 9
    assert shattering_union_bound(n, 3, math.log(n) / 3) > 0
    assert shattering_union_bound(n, 3, 50.0) < shattering_union_bound(n, 3, 5.0)


def test_shattering_trial_with_huge_level() -> None:
    record = shattering_trial(ShatteringTask(1000, 3, 1e6, 0, 0, 5))
    assert record.max_component_edges == 0
    assert not record.exceeded


def test_fluctuation_window_defaults() -> None:
    n = 10**4
    window = fluctuation_window(n, 1.0, 1.0)
    assert window.tau_low == pytest.approx(0.5)
    assert window.tau_high == pytest.approx(5 / 6)
    assert window.low < math.log(n) < window.high
    heavy_tail = fluctuation_window(n, 0.5, 1.0)
    assert heavy_tail.tau_low == pytest.approx(0.75)


def test_lower_tail_threshold() -> None:
    n = 10**4
    assert lower_tail_threshold(n, 1.0, 0.1) == pytest.approx(0.9 * math.log(n))
    assert lower_tail_threshold(n, 1.5, 0.1) == pytest.approx(
        0.9 * math.log(n) ** (1 / 1.5)
    )
    with pytest.raises(ValueError, match="k_value"):
        lower_tail_threshold(n, 4.0, 0.1)
    assert lower_tail_threshold(n, 4.0, 0.1, k_value=1.0) == pytest.approx(
        0.9 * 2**0.25 * math.log(n) ** 0.25
    )


@pytest.mark.parametrize(("alpha", "seed"), [(0.5, 0), (1.0, 1), (4.0, 2)])
def test_exact_checks_hold(alpha: float, seed: int) -> None:
    network = network_for_trial(500, 3, alpha, seed)
    decomposition = decompose(network, DecompositionParams.from_schedule(500, alpha))
    top = lambda_max(SparseSym.from_network(network))
    checks = exact_checks(decomposition, top)
    assert [check.name for check in checks] == [
        "lambda_dominates_max_weight",
        "light_part_bounded",
        "weyl_triangle",
    ]
    assert all(check.passed for check in checks)


def test_transition_records() -> None:
    records = transition_experiment([200, 400], 3, [1.0, 4.0], 2, seed=7, threads=1)
    assert len(records) == 8
    assert [(r.n, r.alpha, r.trial) for r in records] == [
        (n, alpha, t) for n in (200, 400) for alpha in (1.0, 4.0) for t in range(2)
    ]
    assert all(record.lambda_dominates_max_weight for record in records)
    assert all(record.converged for record in records)
    for record in records:
        k_value = record.center * 2 ** (-1 / record.alpha) if record.alpha > 2 else None
        threshold = lower_tail_threshold(record.n, record.alpha, 0.1, k_value)
        assert record.above_lower_tail == (record.lambda1 >= threshold)
        scale = record.lambda1 / record.ratio
        assert threshold == pytest.approx(0.9 * record.center * scale)
    assert len({record.seed for record in records}) == 8
    for record in records:
        assert record.ratio == pytest.approx(
            record.lambda1 / math.log(record.n) ** (1 / record.alpha)
        )
    again = transition_experiment([200, 400], 3, [1.0, 4.0], 2, seed=7, threads=1)
    assert again == records


def test_decomposition_of_unit_network_is_all_heavy() -> None:
    network = WeightedNetwork.unit(_prism(5))
    decomposition = Decomposition(network, DecompositionParams.create(1.0, 0.5))
    assert decomposition.heavy.all()
    assert decomposition.max_component_edges() == network.graph.edge_count
    graph = network.graph
    assert int(decomposition.excess.sum()) == graph.edge_count - graph.n + 1
