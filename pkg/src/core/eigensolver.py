"""
Eigensolver policy - dense eigh below the dense limit, Lanczos (eigsh) above
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .config import get_settings
from .errors import ConvergenceError, ParameterError
from .hilbert import SparseOperator

logger = logging.getLogger(__name__)

SOLVERS = ('auto', 'dense', 'iterative')


def resolve_solver(solver: str, dim: int) -> str:
    if solver not in SOLVERS:
        raise ParameterError(f"solver must be one of {SOLVERS}, got {solver!r}")
    if solver == 'auto':
        return 'dense' if dim <= get_settings().dense_limit else 'iterative'
    return solver


def fix_sign(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column positive"""
    vectors = np.array(vectors, dtype=np.float64, copy=True)
    if vectors.ndim == 1:
        return vectors if vectors[np.argmax(np.abs(vectors))] >= 0 else -vectors
    for col in range(vectors.shape[1]):
        if vectors[np.argmax(np.abs(vectors[:, col])), col] < 0:
            vectors[:, col] *= -1
    return vectors


def lowest_eigenpairs(
    operator: SparseOperator,
    count: int,
    solver: str = 'auto',
    seed: Optional[int] = None,
    want_vectors: bool = True,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Lowest `count` eigenvalues (ascending) and optionally eigenvectors

    Args:
        operator: symmetric operator
        count: number of eigenpairs, 1..dim
        solver: 'auto' | 'dense' | 'iterative'
        seed: seeds the Lanczos start vector, so iterative results repeat

    Returns:
        (values, vectors) with vectors as columns, or None when not requested
    """
    dim = operator.dim
    if not 1 <= count <= dim:
        raise ParameterError(f"count must be in 1..{dim}, got {count}")
    method = resolve_solver(solver, dim)
    if method == 'iterative' and count >= dim - 1:
        method = 'dense'
    logger.debug(f"Eigensolver {method} for dim={dim}, count={count}")

    if method == 'dense':
        matrix = operator.toarray(force=(solver == 'dense'))
        if want_vectors:
            values, vectors = scipy.linalg.eigh(matrix, subset_by_index=[0, count - 1])
            return values, fix_sign(vectors)
        values = scipy.linalg.eigh(matrix, eigvals_only=True, subset_by_index=[0, count - 1])
        return values, None

    seed = get_settings().seed if seed is None else seed
    v0 = np.random.default_rng(seed).standard_normal(dim)
    try:
        values, vectors = eigsh(operator.to_csr(), k=count, which='SA', v0=v0, tol=0.0)
    except ArpackNoConvergence as exc:
        raise ConvergenceError(f"Lanczos did not converge for dim={dim}: {exc}")
    order = np.argsort(values)
    values, vectors = values[order], vectors[:, order]
    return values, (fix_sign(vectors) if want_vectors else None)


def residual_norm(operator: SparseOperator, value: float, vector: np.ndarray) -> float:
    return float(np.linalg.norm(operator.matvec(vector) - value * vector))


def ground_cluster(values: np.ndarray, tol: float) -> int:
    """Number of leading eigenvalues within tol of the minimum"""
    values = np.sort(np.asarray(values))
    return int(np.count_nonzero(values - values[0] <= tol))


def group_eigenvalues(values: np.ndarray, tol: float = 1e-8) -> List[Tuple[float, int]]:
    """Cluster sorted eigenvalues whose neighbours differ by <= tol"""
    values = np.sort(np.asarray(values, dtype=np.float64))
    groups: List[List[float]] = []
    for v in values:
        if groups and v - groups[-1][-1] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]
