"""Largest eigenpairs of sparse symmetric matrices.

`lambda_max` runs a restarted Krylov (Lanczos-type) iteration with full
reorthogonalization on the shifted operator M + sigma*I, sigma being the
Gershgorin bound, so the largest algebraic eigenvalue of M is the dominant one
of the shifted operator. Each cycle keeps the best Ritz vectors and continues
the Krylov sequence from the residual of the top one. `dense_eigs` is a cyclic
Jacobi oracle for small matrices.
"""

from __future__ import annotations

__copyright__ = """
Copyright (c) 2026 regspec contributors.
SPDX-License-Identifier: MIT
"""

import logging
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
import scipy.linalg
from scipy import sparse

from regspec.rng import derive_seed, make_rng

if TYPE_CHECKING:
    from regspec.weights import WeightedNetwork

_logger = logging.getLogger().getChild(__name__)

_DEFAULT_TOL = 1e-10
_DEFAULT_MAX_ITER = 5000
_DEFAULT_RESTART_LENGTH = 64
_DEFAULT_RETAINED = 8
_BREAKDOWN = 1e-10
_DENSE_LIMIT = 512
_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100
_EPSILON = float(np.finfo(np.float64).eps)


class EmptyMatrixError(ValueError):
    pass


class SizeExceededError(ValueError):
    pass


class SparseSym:
    """A real symmetric matrix in compressed sparse row form.

    Explicit zeros are dropped and column indices are sorted, so entry (i, j)
    is stored exactly when (j, i) is, with the same value.
    """

    def __init__(self, matrix: sparse.spmatrix | np.ndarray) -> None:
        csr = sparse.csr_matrix(matrix, dtype=np.float64)
        if csr.shape[0] != csr.shape[1]:
            msg = f"matrix must be square, got shape {csr.shape}"
            raise ValueError(msg)
        csr.eliminate_zeros()
        csr.sort_indices()
        if (csr != csr.T).nnz:
            msg = "matrix is not symmetric"
            raise ValueError(msg)
        self.matrix = csr
        self.n = csr.shape[0]

    @classmethod
    def from_edges(
        cls, n: int, edges: np.ndarray, values: np.ndarray
    ) -> SparseSym:
        """Symmetric matrix with M_ij = M_ji = value for every edge (i, j)."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        values = np.asarray(values, dtype=np.float64)
        rows = np.concatenate((edges[:, 0], edges[:, 1]))
        cols = np.concatenate((edges[:, 1], edges[:, 0]))
        data = np.concatenate((values, values))
        return cls(sparse.csr_matrix((data, (rows, cols)), shape=(n, n)))

    @classmethod
    def from_dense(cls, array: np.ndarray) -> SparseSym:
        return cls(np.asarray(array, dtype=np.float64))

    @classmethod
    def from_network(
        cls, network: WeightedNetwork, edge_mask: np.ndarray | None = None
    ) -> SparseSym:
        return cls(network.to_sparse(edge_mask))

    def gershgorin(self) -> float:
        """max_i sum_j |M_ij|."""
        if self.n == 0:
            return 0.0
        return float(np.asarray(abs(self.matrix).sum(axis=1)).max())

    def negated(self) -> SparseSym:
        return SparseSym(-self.matrix)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector


class EigenPair(NamedTuple):
    """Top eigenpair with its residual certificate.

    `value` is the eigenvalue estimate, `vector` the unit eigenvector with its
    first significant coordinate positive, `residual` the explicitly computed
    norm of M f - value f, and `iterations` the number of products with M.
    """

    value: float
    vector: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _orthogonalize(vector: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # Classical Gram-Schmidt applied twice.
    for _ in range(2):
        vector = vector - basis.T @ (basis @ vector)
    return vector


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    magnitude = np.abs(vector)
    first = int(np.argmax(magnitude > np.finfo(np.float64).eps * magnitude.max()))
    return -vector if vector[first] < 0 else vector


def _as_sparse_sym(matrix: SparseSym | sparse.spmatrix | np.ndarray) -> SparseSym:
    return matrix if isinstance(matrix, SparseSym) else SparseSym(matrix)


def lambda_max(  # noqa: C901, PLR0913, PLR0914, PLR0917
    matrix: SparseSym | sparse.spmatrix | np.ndarray,
    tol: float = _DEFAULT_TOL,
    max_iter: int = _DEFAULT_MAX_ITER,
    seed: int = 0,
    restart_length: int = _DEFAULT_RESTART_LENGTH,
    retained: int = _DEFAULT_RETAINED,
) -> EigenPair:
    """Largest algebraic eigenvalue and its eigenvector.

    Args:
    ----
      matrix: Symmetric matrix.
      tol: Relative tolerance; converged means the residual is at most
        tol * (|lambda| + sigma).
      max_iter: Budget of matrix-vector products.
      seed: Seed of the deterministic start vector.
      restart_length: Krylov basis size per cycle.
      retained: Ritz vectors kept across a restart.

    Returns:
    -------
      The eigenpair; on budget exhaustion the best iterate, flagged
      unconverged.

    """
    operator = _as_sparse_sym(matrix)
    n = operator.n
    if n == 0:
        msg = "cannot take the top eigenpair of an empty matrix"
        raise EmptyMatrixError(msg)
    if tol <= 0:
        msg = f"tolerance must be positive, got {tol}"
        raise ValueError(msg)

    sigma = operator.gershgorin()
    if sigma == 0:
        vector = np.zeros(n)
        vector[0] = 1.0
        return EigenPair(0.0, vector, 0.0, 0, converged=True)

    def apply(x: np.ndarray) -> np.ndarray:
        return operator.matrix @ x + sigma * x

    rng = make_rng(derive_seed(seed, n))
    size = min(restart_length, n)
    keep = max(1, min(retained, size - 1))
    basis = np.zeros((size, n))
    images = np.zeros((size, n))
    start = rng.standard_normal(n)
    basis[0] = start / np.linalg.norm(start)
    width, filled, iterations, cycles = 1, 0, 0, 0

    while True:
        while filled < width:
            images[filled] = apply(basis[filled])
            filled += 1
            iterations += 1

        if width < size and iterations < max_iter:
            direction = _orthogonalize(images[width - 1], basis[:width])
            norm = np.linalg.norm(direction)
            if norm <= _BREAKDOWN * sigma:
                direction = _orthogonalize(rng.standard_normal(n), basis[:width])
                norm = np.linalg.norm(direction)
            basis[width] = direction / norm
            width += 1
            continue

        projected = basis[:width] @ images[:width].T
        theta, coefficients = scipy.linalg.eigh((projected + projected.T) / 2)
        top = coefficients[:, -1]
        vector = top @ basis[:width]
        image = top @ images[:width]
        remainder = image - theta[-1] * vector
        residual = float(np.linalg.norm(remainder))
        value = float(theta[-1] - sigma)
        cycles += 1
        _logger.debug(
            "cycle %d: lambda=%.17g residual=%.3g after %d products",
            cycles,
            value,
            residual,
            iterations,
        )
        if (
            residual <= 0.5 * tol * (abs(value) + sigma)
            or iterations >= max_iter
            or width == n
        ):
            break

        ritz = coefficients[:, -keep:].T
        basis[:keep] = ritz @ basis[:width]
        images[:keep] = ritz @ images[:width]
        direction = _orthogonalize(remainder, basis[:keep])
        norm = np.linalg.norm(direction)
        if norm <= _BREAKDOWN * sigma:
            direction = _orthogonalize(rng.standard_normal(n), basis[:keep])
            norm = np.linalg.norm(direction)
        basis[keep] = direction / norm
        width, filled = keep + 1, keep

    vector = _fix_sign(vector / np.linalg.norm(vector))
    residual = float(np.linalg.norm(operator.matrix @ vector - value * vector))
    converged = residual <= tol * (abs(value) + sigma)
    if not converged:
        _logger.warning(
            "top eigenpair unconverged after %d products: residual %.3g",
            iterations,
            residual,
        )
    return EigenPair(value, vector, residual, iterations, converged)


def spectral_norm(
    matrix: SparseSym | sparse.spmatrix | np.ndarray,
    tol: float = _DEFAULT_TOL,
    max_iter: int = _DEFAULT_MAX_ITER,
    seed: int = 0,
) -> float:
    """max(lambda_max(M), lambda_max(-M))."""
    operator = _as_sparse_sym(matrix)
    top = lambda_max(operator, tol, max_iter, seed)
    bottom = lambda_max(operator.negated(), tol, max_iter, seed)
    return max(top.value, bottom.value)


def max_entry_lower_bound(matrix: SparseSym | sparse.spmatrix | np.ndarray) -> float:
    """max |M_ij| over off-diagonal entries of a zero-diagonal matrix."""
    operator = _as_sparse_sym(matrix)
    if np.any(operator.matrix.diagonal() != 0):
        msg = "matrix must have a zero diagonal"
        raise ValueError(msg)
    data = operator.matrix.data
    return float(np.abs(data).max()) if len(data) else 0.0


def rayleigh_quotient(
    matrix: SparseSym | sparse.spmatrix | np.ndarray, vector: np.ndarray
) -> float:
    operator = _as_sparse_sym(matrix)
    return float(vector @ (operator.matrix @ vector) / (vector @ vector))


class DenseSpectrum(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair once."""
    players = n + n % 2
    ring = list(range(players))
    rounds = []
    for _ in range(players - 1):
        pairs = [
            (min(ring[i], ring[-1 - i]), max(ring[i], ring[-1 - i]))
            for i in range(players // 2)
        ]
        pairs = [(p, q) for p, q in pairs if q < n]
        rounds.append(
            (
                np.array([p for p, _ in pairs], dtype=np.int64),
                np.array([q for _, q in pairs], dtype=np.int64),
            )
        )
        ring = [ring[0], ring[-1], *ring[1:-1]]
    return rounds


def dense_eigs(
    matrix: SparseSym | sparse.spmatrix | np.ndarray,
) -> DenseSpectrum:
    """All eigenpairs of a small symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so
    that the rotations of a round act on disjoint index pairs and are applied
    together. Sweeps stop once the off-diagonal Frobenius norm is at most
    1e-12 times the Frobenius norm of the matrix. Eigenvalues are returned in
    descending order with eigenvectors as matching columns.
    """
    if isinstance(matrix, SparseSym):
        a = matrix.to_dense()
    elif sparse.issparse(matrix):
        a = matrix.toarray()
    else:
        a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        msg = f"matrix must be square, got shape {a.shape}"
        raise ValueError(msg)
    if n > _DENSE_LIMIT:
        msg = f"dense oracle handles n <= {_DENSE_LIMIT}, got {n}"
        raise SizeExceededError(msg)
    if not np.array_equal(a, a.T):
        msg = "matrix is not symmetric"
        raise ValueError(msg)

    vectors = np.eye(n)
    target = _JACOBI_TOL * np.linalg.norm(a)
    rounds = _round_robin(n)
    for sweep in range(_JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= target:
            break
        for p_all, q_all in rounds:
            apq = a[p_all, q_all]
            scale = np.abs(a[p_all, p_all]) + np.abs(a[q_all, q_all])
            negligible = np.abs(apq) <= _EPSILON * scale
            a[p_all[negligible], q_all[negligible]] = 0.0
            a[q_all[negligible], p_all[negligible]] = 0.0
            active = ~negligible
            if not active.any():
                continue
            p, q, apq = p_all[active], q_all[active], apq[active]
            tau = (a[q, q] - a[p, p]) / (2 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1 + tau * tau))
            c = 1 / np.sqrt(1 + t * t)
            s = t * c

            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vec_p, vec_q = vectors[:, p].copy(), vectors[:, q].copy()
            vectors[:, p] = c * vec_p - s * vec_q
            vectors[:, q] = s * vec_p + c * vec_q
        _logger.debug("jacobi sweep %d: off-diagonal norm %.3g", sweep, off)
    else:
        _logger.warning("jacobi stopped after %d sweeps", _JACOBI_MAX_SWEEPS)

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return DenseSpectrum(values[order], vectors[:, order])
