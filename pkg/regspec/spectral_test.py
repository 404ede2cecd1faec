"""Unit tests for regspec.spectral."""

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import math

import numpy as np
import pytest
from scipy import sparse

from regspec.regular_graph import RegularGraph, generate_regular
from regspec.rng import make_rng
from regspec.spectral import (
    EmptyMatrixError,
    SizeExceededError,
    SparseSym,
    dense_eigs,
    lambda_max,
    max_entry_lower_bound,
    rayleigh_quotient,
    spectral_norm,
)
from regspec.weights import WeibullParams, WeightedNetwork, weigh

_K4_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _random_symmetric(n: int, seed: int) -> np.ndarray:
    a = make_rng(seed).standard_normal((n, n))
    return (a + a.T) / 2


def test_two_by_two() -> None:
    pair = lambda_max(SparseSym.from_dense([[0.0, 3.0], [3.0, 0.0]]))
    assert pair.converged
    assert pair.value == pytest.approx(3.0, abs=1e-12)
    assert pair.vector == pytest.approx([1 / math.sqrt(2), 1 / math.sqrt(2)])


@pytest.mark.parametrize(("a", "b"), [(1.0, 1.0), (3.0, -4.0), (0.5, 2.0)])
def test_weighted_path(a: float, b: float) -> None:
    matrix = SparseSym.from_edges(3, np.array([(0, 1), (1, 2)]), np.array([a, b]))
    pair = lambda_max(matrix)
    assert pair.value == pytest.approx(math.hypot(a, b), abs=1e-10)
    assert pair.vector[0] > 0


def test_k4_top_eigenpair() -> None:
    graph = RegularGraph.from_edges(4, 3, _K4_EDGES)
    pair = lambda_max(WeightedNetwork.unit(graph).to_sparse())
    assert pair.value == pytest.approx(3.0, abs=1e-10)
    assert pair.vector == pytest.approx([0.5] * 4, abs=1e-8)


def test_shift_finds_largest_algebraic_eigenvalue() -> None:
    graph = RegularGraph.from_edges(4, 3, _K4_EDGES)
    matrix = SparseSym(WeightedNetwork.unit(graph).to_sparse()).negated()
    assert lambda_max(matrix).value == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize(("n", "d"), [(200, 3), (500, 4)])
def test_regular_adjacency_has_top_eigenvalue_d(n: int, d: int) -> None:
    graph = generate_regular(n, d, 3)
    pair = lambda_max(WeightedNetwork.unit(graph).to_sparse())
    assert pair.converged
    assert pair.value == pytest.approx(d, abs=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_matches_dense_oracle(seed: int) -> None:
    network = weigh(generate_regular(120, 3, seed), WeibullParams.create(0.8), seed)
    matrix = SparseSym.from_network(network)
    pair = lambda_max(matrix, seed=seed)
    spectrum = dense_eigs(matrix)
    assert pair.converged
    assert pair.value == pytest.approx(spectrum.values[0], abs=1e-8)
    assert abs(pair.vector @ spectrum.vectors[:, 0]) == pytest.approx(1.0, abs=1e-6)


def test_residual_certificate() -> None:
    network = weigh(generate_regular(2000, 3, 1), WeibullParams.create(1.0), 2)
    matrix = SparseSym.from_network(network)
    tol = 1e-10
    pair = lambda_max(matrix, tol=tol)
    assert pair.converged
    assert np.linalg.norm(pair.vector) == pytest.approx(1.0)
    assert pair.residual <= tol * (abs(pair.value) + matrix.gershgorin())
    assert rayleigh_quotient(matrix, pair.vector) == pytest.approx(pair.value, abs=1e-8)
    assert pair.value >= max_entry_lower_bound(matrix)


def test_budget_exhaustion_is_flagged() -> None:
    network = weigh(generate_regular(2000, 3, 1), WeibullParams.create(1.0), 2)
    pair = lambda_max(SparseSym.from_network(network), max_iter=3)
    assert not pair.converged
    assert pair.iterations == 3


def test_is_deterministic() -> None:
    network = weigh(generate_regular(300, 3, 4), WeibullParams.create(1.0), 4)
    first = lambda_max(network.to_sparse(), seed=7)
    second = lambda_max(network.to_sparse(), seed=7)
    assert first.value == second.value
    assert np.array_equal(first.vector, second.vector)


def test_zero_matrix() -> None:
    pair = lambda_max(sparse.csr_matrix((5, 5)))
    assert pair.value == 0.0
    assert pair.vector.tolist() == [1.0, 0.0, 0.0, 0.0, 0.0]
    assert pair.converged


def test_empty_matrix() -> None:
    with pytest.raises(EmptyMatrixError):
        lambda_max(sparse.csr_matrix((0, 0)))


def test_rejects_asymmetric_matrix() -> None:
    with pytest.raises(ValueError, match="symmetric"):
        SparseSym.from_dense([[0.0, 1.0], [2.0, 0.0]])


def test_spectral_norm_and_entry_bound() -> None:
    network = weigh(generate_regular(80, 3, 6), WeibullParams.create(0.6), 6)
    matrix = SparseSym.from_network(network)
    values = dense_eigs(matrix).values
    norm = spectral_norm(matrix)
    assert norm == pytest.approx(max(abs(values[0]), abs(values[-1])), abs=1e-8)
    assert max_entry_lower_bound(matrix) == pytest.approx(network.max_abs_weight)
    assert max_entry_lower_bound(matrix) <= norm


def test_entry_bound_needs_zero_diagonal() -> None:
    with pytest.raises(ValueError, match="diagonal"):
        max_entry_lower_bound(np.eye(3))


@pytest.mark.parametrize("n", [1, 2, 7, 40])
def test_dense_oracle_against_lapack(n: int) -> None:
    a = _random_symmetric(n, n)
    spectrum = dense_eigs(a)
    assert spectrum.values == pytest.approx(np.linalg.eigvalsh(a)[::-1], abs=1e-10)
    assert np.all(np.diff(spectrum.values) <= 0)
    reconstructed = spectrum.vectors @ np.diag(spectrum.values) @ spectrum.vectors.T
    assert reconstructed == pytest.approx(a, abs=1e-10)
    assert spectrum.vectors.T @ spectrum.vectors == pytest.approx(np.eye(n), abs=1e-10)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_dense_oracle_reaches_tolerance(
    seed: int, caplog: pytest.LogCaptureFixture
) -> None:
    a = _random_symmetric(40, seed)
    spectrum = dense_eigs(a)
    rotated = spectrum.vectors.T @ a @ spectrum.vectors
    off = np.linalg.norm(rotated - np.diag(np.diag(rotated)))
    assert off <= 1e-11 * np.linalg.norm(a)
    assert "jacobi stopped" not in caplog.text


def test_dense_oracle_with_negligible_couplings() -> None:
    a = np.diag(np.arange(1.0, 9.0) * 1e8)
    a[0, 1] = a[1, 0] = 1e-300
    a[2, 5] = a[5, 2] = 1e-9
    a[3, 4] = a[4, 3] = 1e5
    with np.errstate(over="raise", divide="raise", invalid="raise"):
        spectrum = dense_eigs(a)
    assert spectrum.values == pytest.approx(np.linalg.eigvalsh(a)[::-1], rel=1e-12)
    assert spectrum.vectors.T @ spectrum.vectors == pytest.approx(np.eye(8), abs=1e-12)



def test_dense_oracle_with_repeated_eigenvalues() -> None:
    graph = RegularGraph.from_edges(4, 3, _K4_EDGES)
    spectrum = dense_eigs(WeightedNetwork.unit(graph).to_sparse())
    assert spectrum.values == pytest.approx([3.0, -1.0, -1.0, -1.0], abs=1e-12)


def test_dense_oracle_size_limit() -> None:
    with pytest.raises(SizeExceededError):
        dense_eigs(sparse.identity(513, format="csr"))
