#!/usr/bin/env python3
"""
Hilbert space tools - color bases and sparse operators

A configuration of n sites with colors 0..k is stored as the integer
code = sum_s color_s * (k+1)**(n - s), i.e. site 1 is the most significant
digit, so ascending codes list kets |c_1 c_2 ... c_n> lexicographically.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .config import get_settings
from .errors import BasisMismatchError, ParameterError, SizeCapError
from .lattice import SimplexLattice

logger = logging.getLogger(__name__)


# ── encoding helpers ─────────────────────────────────────────────────────────

def site_weights(k: int, n_sites: int) -> np.ndarray:
    """Place value of each site (index s-1 for site s)"""
    return (k + 1) ** np.arange(n_sites - 1, -1, -1, dtype=np.int64)


def decode(codes: np.ndarray, k: int, n_sites: int) -> np.ndarray:
    """codes (m,) -> colors (m, n_sites)"""
    codes = np.asarray(codes, dtype=np.int64)
    return (codes[:, None] // site_weights(k, n_sites)[None, :]) % (k + 1)


def encode(colors: np.ndarray, k: int) -> np.ndarray:
    """colors (m, n_sites) -> codes (m,)"""
    colors = np.atleast_2d(np.asarray(colors, dtype=np.int64))
    return colors @ site_weights(k, colors.shape[1])


def color_counts(colors: np.ndarray, k: int) -> np.ndarray:
    """colors (m, n_sites) -> per-state color content (m, k+1)"""
    return np.stack([(colors == c).sum(axis=1) for c in range(k + 1)], axis=1)


def multinomial(counts: Sequence[int]) -> int:
    result = math.factorial(sum(counts))
    for c in counts:
        result //= math.factorial(c)
    return result


# ── bases ────────────────────────────────────────────────────────────────────

class ColorBasis:
    """Common interface of the full basis and fixed-content sectors"""

    k: int
    n_sites: int
    codes: np.ndarray

    @property
    def dim(self) -> int:
        return int(len(self.codes))

    @property
    def states(self) -> np.ndarray:
        return self.codes

    @property
    def tag(self) -> Tuple:
        raise NotImplementedError

    def colors(self) -> np.ndarray:
        return decode(self.codes, self.k, self.n_sites)

    def index_of(self, codes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return isinstance(other, ColorBasis) and self.tag == other.tag

    def __hash__(self) -> int:
        return hash(self.tag)


class FullBasis(ColorBasis):
    """All (k+1)**n_sites configurations"""

    def __init__(self, k: int, n_sites: int):
        _check_k_sites(k, n_sites)
        dim = (k + 1) ** n_sites
        cap = get_settings().full_basis_cap
        if dim > cap:
            raise SizeCapError(
                f"full basis (k+1)^n = {dim} exceeds cap {cap}; use a color-content sector")
        self.k = k
        self.n_sites = n_sites
        self._dim = dim
        self._codes = None

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def codes(self) -> np.ndarray:
        if self._codes is None:
            self._codes = np.arange(self._dim, dtype=np.int64)
        return self._codes

    @property
    def tag(self) -> Tuple:
        return ('full', self.k, self.n_sites)

    def index_of(self, codes: np.ndarray) -> np.ndarray:
        return np.asarray(codes, dtype=np.int64)

    def __repr__(self):
        return f"<FullBasis k={self.k} n={self.n_sites} dim={self.dim}>"


class SectorBasis(ColorBasis):
    """Configurations with a fixed color content (n_0, ..., n_k), ascending by code"""

    def __init__(self, k: int, n_sites: int, content: Tuple[int, ...], codes: np.ndarray):
        self.k = k
        self.n_sites = n_sites
        self.content = tuple(int(c) for c in content)
        self.codes = codes
        self._index = None

    @property
    def tag(self) -> Tuple:
        return ('sector', self.k, self.n_sites, self.content)

    @property
    def index(self) -> dict:
        """code -> position map"""
        if self._index is None:
            self._index = {int(c): i for i, c in enumerate(self.codes)}
        return self._index

    def index_of(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        pos = np.searchsorted(self.codes, codes)
        pos_clipped = np.minimum(pos, self.dim - 1)
        if np.any(self.codes[pos_clipped] != codes):
            raise BasisMismatchError(f"configuration outside sector {self.content}")
        return pos_clipped

    def __repr__(self):
        return f"<SectorBasis k={self.k} n={self.n_sites} content={self.content} dim={self.dim}>"


Basis = Union[FullBasis, SectorBasis]


def _check_k_sites(k: int, n_sites: int) -> None:
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if n_sites < 1:
        raise ParameterError(f"n_sites must be >= 1, got {n_sites}")


@lru_cache(maxsize=64)
def _sector_codes(k: int, n_sites: int, content: Tuple[int, ...]) -> np.ndarray:
    codes = np.zeros(1, dtype=np.int64)
    remaining = np.array([content], dtype=np.int64)
    weights = site_weights(k, n_sites)

    for s in range(n_sites):
        new_codes, new_remaining = [], []
        for c in range(k + 1):
            mask = remaining[:, c] > 0
            if not np.any(mask):
                continue
            new_codes.append(codes[mask] + c * weights[s])
            rem = remaining[mask].copy()
            rem[:, c] -= 1
            new_remaining.append(rem)
        codes = np.concatenate(new_codes)
        remaining = np.concatenate(new_remaining)

    codes = np.sort(codes)
    codes.setflags(write=False)
    return codes


def enumerate_sector(k: int, n_sites: int, content: Sequence[int]) -> SectorBasis:
    """
    Enumerate all configurations with the given color content

    Args:
        k: colors are 0..k
        n_sites: number of sites
        content: counts (n_0, ..., n_k)

    Returns:
        SectorBasis with multinomial(n_sites; content) states sorted by code
    """
    _check_k_sites(k, n_sites)
    content = tuple(int(c) for c in content)
    if len(content) != k + 1:
        raise ParameterError(f"content needs {k + 1} counts, got {len(content)}")
    if any(c < 0 for c in content):
        raise ParameterError(f"color counts must be >= 0, got {content}")
    if sum(content) != n_sites:
        raise ParameterError(f"content {content} sums to {sum(content)}, expected {n_sites}")

    codes = _sector_codes(k, n_sites, content)
    logger.debug(f"Sector {content} on {n_sites} sites: {len(codes)} states")
    return SectorBasis(k, n_sites, content, codes)


def balanced_content(k: int, layers: int) -> Tuple[int, ...]:
    """Each color appears once per layer"""
    return (layers,) * (k + 1)


def iter_contents(k: int, n_sites: int) -> Iterator[Tuple[int, ...]]:
    """All weak compositions of n_sites into k+1 color counts"""
    for bars in itertools.combinations(range(n_sites + k), k):
        prev = -1
        counts = []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(n_sites + k - prev - 1)
        yield tuple(counts)


def all_sectors(k: int, n_sites: int) -> List[SectorBasis]:
    return [enumerate_sector(k, n_sites, c) for c in iter_contents(k, n_sites)]


# ── sparse operators ─────────────────────────────────────────────────────────

class SparseOperator:
    """
    Real operator in coordinate-triplet form over a color basis.

    Triplets are row-major sorted without duplicates. Operators built as
    Hamiltonians are checked for symmetry at construction.
    """

    def __init__(self, matrix: sp.spmatrix, basis: Basis, target_basis: Optional[Basis] = None,
                 symmetric: bool = True):
        target_basis = target_basis if target_basis is not None else basis
        csr = sp.csr_matrix(matrix, dtype=np.float64)
        if csr.shape != (target_basis.dim, basis.dim):
            raise BasisMismatchError(
                f"matrix shape {csr.shape} does not match basis dims ({target_basis.dim}, {basis.dim})")
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        if not np.all(np.isfinite(csr.data)):
            raise ParameterError("operator has non-finite entries")

        self.basis = basis
        self.target_basis = target_basis
        self._csr = csr
        self.symmetric = symmetric
        if symmetric and not self.is_symmetric(tol=1e-13 * max(1.0, self.max_abs())):
            raise ParameterError("operator declared symmetric is not")

    @classmethod
    def from_coo(cls, rows, cols, values, basis: Basis, target_basis: Optional[Basis] = None,
                 symmetric: bool = True) -> 'SparseOperator':
        target = target_basis if target_basis is not None else basis
        matrix = sp.coo_matrix(
            (np.asarray(values, dtype=np.float64),
             (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(target.dim, basis.dim))
        return cls(matrix, basis, target_basis, symmetric)

    @classmethod
    def zeros(cls, basis: Basis) -> 'SparseOperator':
        return cls(sp.csr_matrix((basis.dim, basis.dim)), basis)

    # -- views ---------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def shape(self) -> Tuple[int, int]:
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return int(self._csr.nnz)

    @property
    def tag(self) -> Tuple:
        return self.basis.tag

    @property
    def triplets(self) -> List[Tuple[int, int, float]]:
        coo = self._csr.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def to_csr(self) -> sp.csr_matrix:
        return self._csr

    def toarray(self, force: bool = False) -> np.ndarray:
        limit = get_settings().dense_limit
        if not force and max(self.shape) > limit:
            raise SizeCapError(f"dimension {max(self.shape)} exceeds dense limit {limit}")
        return self._csr.toarray()

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._csr.data))) if self.nnz else 0.0

    def is_symmetric(self, tol: float = 0.0) -> bool:
        if self.shape[0] != self.shape[1]:
            return False
        diff = (self._csr - self._csr.T).tocsr()
        diff.eliminate_zeros()
        if diff.nnz == 0:
            return True
        return float(np.max(np.abs(diff.data))) <= tol

    # -- algebra -------------------------------------------------------------

    def _check_same(self, other: 'SparseOperator') -> None:
        if self.basis != other.basis or self.target_basis != other.target_basis:
            raise BasisMismatchError(f"basis mismatch: {self.basis.tag} vs {other.basis.tag}")

    def __add__(self, other: 'SparseOperator') -> 'SparseOperator':
        self._check_same(other)
        return SparseOperator(self._csr + other._csr, self.basis, self.target_basis,
                              self.symmetric and other.symmetric)

    def __sub__(self, other: 'SparseOperator') -> 'SparseOperator':
        self._check_same(other)
        return SparseOperator(self._csr - other._csr, self.basis, self.target_basis,
                              self.symmetric and other.symmetric)

    def scaled(self, factor: float) -> 'SparseOperator':
        return SparseOperator(self._csr * float(factor), self.basis, self.target_basis, self.symmetric)

    def matvec(self, x: np.ndarray, partitions: int = 1, workers: Optional[int] = None) -> np.ndarray:
        """
        y = A x, rows split into contiguous blocks.

        Each row is summed in stored column order inside one block, so the
        result is bitwise identical for any partition count.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.shape[1]:
            raise BasisMismatchError(f"vector length {x.shape[0]} != operator dim {self.shape[1]}")
        n_rows = self.shape[0]
        partitions = max(1, min(int(partitions), n_rows))
        bounds = np.linspace(0, n_rows, partitions + 1).astype(np.int64)
        y = np.empty((n_rows,) + x.shape[1:], dtype=np.float64)

        def run(block: int) -> None:
            start, stop = bounds[block], bounds[block + 1]
            y[start:stop] = self._csr[start:stop] @ x

        workers = workers if workers is not None else get_settings().workers
        if workers > 1 and partitions > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(run, range(partitions)))
        else:
            for block in range(partitions):
                run(block)
        return y

    def expectation(self, vector: np.ndarray) -> float:
        return float(vector @ self.matvec(vector))

    # -- export ----------------------------------------------------------------

    def to_triplet_text(self) -> str:
        """'dim nnz' header, then 1-based 'row col value' lines"""
        coo = self._csr.tocoo()
        lines = [f"{self.dim} {self.nnz}"]
        lines.extend(f"{r + 1} {c + 1} {v:.17g}" for r, c, v in zip(coo.row, coo.col, coo.data))
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_triplet_text(cls, text: str, basis: Basis, symmetric: bool = True) -> 'SparseOperator':
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        dim, nnz = (int(v) for v in lines[0].split())
        if dim != basis.dim:
            raise BasisMismatchError(f"triplet file dim {dim} != basis dim {basis.dim}")
        if len(lines) - 1 != nnz:
            raise ParameterError(f"header announces {nnz} entries, found {len(lines) - 1}")
        rows, cols, vals = [], [], []
        for ln in lines[1:]:
            r, c, v = ln.split()
            rows.append(int(r) - 1)
            cols.append(int(c) - 1)
            vals.append(float(v))
        return cls.from_coo(rows, cols, vals, basis, symmetric=symmetric)

    def __repr__(self):
        return f"<SparseOperator dim={self.dim} nnz={self.nnz} basis={self.basis.tag}>"


# ── operator builders ────────────────────────────────────────────────────────

def _check_sites(basis: Basis, *sites: int) -> None:
    for s in sites:
        if not 1 <= s <= basis.n_sites:
            raise ParameterError(f"site {s} outside 1..{basis.n_sites}")


def _swap_triplets(basis: Basis, i: int, j: int) -> Tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of the color exchange between sites i and j"""
    codes = basis.codes
    w = site_weights(basis.k, basis.n_sites)
    wi, wj = w[i - 1], w[j - 1]
    ci = (codes // wi) % (basis.k + 1)
    cj = (codes // wj) % (basis.k + 1)
    mask = ci != cj
    cols = np.nonzero(mask)[0]
    swapped = codes[mask] + (cj[mask] - ci[mask]) * wi + (ci[mask] - cj[mask]) * wj
    rows = basis.index_of(swapped)
    return rows, cols


def bond_operator(k: int, i: int, j: int, basis: Basis) -> SparseOperator:
    """
    h_ij = sum_{a != b} e^{ab}_i e^{ba}_j: swaps distinct colors on sites i, j

    Args:
        k: colors 0..k (must match the basis)
        i, j: 1-based site ids, i != j
        basis: full or sector basis

    Returns:
        0/1-valued symmetric SparseOperator with zero diagonal
    """
    if basis.k != k:
        raise BasisMismatchError(f"basis has k={basis.k}, operator asked for k={k}")
    if i == j:
        raise ParameterError(f"bond needs two distinct sites, got i = j = {i}")
    _check_sites(basis, i, j)
    rows, cols = _swap_triplets(basis, i, j)
    return SparseOperator.from_coo(rows, cols, np.ones(len(rows)), basis)


def bond_sum(basis: Basis, bonds: Sequence[Tuple[int, int, float]]) -> SparseOperator:
    all_rows, all_cols, all_vals = [], [], []
    for i, j, coupling in bonds:
        _check_sites(basis, i, j)
        rows, cols = _swap_triplets(basis, i, j)
        all_rows.append(rows)
        all_cols.append(cols)
        all_vals.append(np.full(len(rows), coupling, dtype=np.float64))
    if not all_rows:
        return SparseOperator.zeros(basis)
    return SparseOperator.from_coo(np.concatenate(all_rows), np.concatenate(all_cols),
                                   np.concatenate(all_vals), basis)


def hamiltonian(lattice: SimplexLattice, basis: Basis) -> SparseOperator:
    """H = sum over bonds of coupling * h_ij on the given basis"""
    if basis.n_sites != lattice.n_sites or basis.k != lattice.k:
        raise BasisMismatchError(
            f"basis (k={basis.k}, n={basis.n_sites}) does not fit lattice "
            f"(k={lattice.k}, n={lattice.n_sites})")
    return bond_sum(basis, [(b.i, b.j, b.coupling) for b in lattice.bonds])


def simplex_hamiltonian(basis: Basis, sites: Sequence[int], coupling: float = 1.0) -> SparseOperator:
    """All-to-all off-diagonal exchange among the given sites"""
    pairs = [(i, j, coupling) for i, j in itertools.combinations(sites, 2)]
    return bond_sum(basis, pairs)


def _equal_pair_count(basis: Basis) -> np.ndarray:
    counts = color_counts(basis.colors(), basis.k)
    return (counts * (counts - 1) // 2).sum(axis=1)


def _require_single_simplex(k: int, basis: Basis) -> None:
    if basis.k != k:
        raise BasisMismatchError(f"basis has k={basis.k}, expected {k}")
    if basis.n_sites != k + 1:
        raise BasisMismatchError(f"single-simplex operator needs {k + 1} sites, basis has {basis.n_sites}")


def delta_h(k: int, basis: Basis) -> SparseOperator:
    """Diagonal pair counter: <x|dH|x> = sum_c C(n_c, 2)"""
    _require_single_simplex(k, basis)
    diag = _equal_pair_count(basis).astype(np.float64)
    return SparseOperator(sp.diags(diag, format='csr'), basis)


def permutation_hamiltonian(k: int, basis: Basis) -> SparseOperator:
    """Sum of all transpositions of a single simplex (identity on equal-color pairs)"""
    _require_single_simplex(k, basis)
    off_diagonal = simplex_hamiltonian(basis, range(1, k + 2))
    return off_diagonal + delta_h(k, basis)


def color_permutation_operator(sigma: Sequence[int], basis: Basis) -> SparseOperator:
    """
    Relabel colors c -> sigma[c] on every site.

    On a sector basis the image lives in the sector with content
    n'_{sigma(c)} = n_c, returned as the operator's target basis.
    """
    sigma = np.asarray(sigma, dtype=np.int64)
    k = basis.k
    if sigma.shape != (k + 1,) or sorted(sigma.tolist()) != list(range(k + 1)):
        raise ParameterError(f"sigma must be a permutation of 0..{k}, got {sigma.tolist()}")

    colors = basis.colors()
    new_codes = encode(sigma[colors], k)

    if isinstance(basis, SectorBasis):
        new_content = [0] * (k + 1)
        for c, count in enumerate(basis.content):
            new_content[int(sigma[c])] = count
        target = enumerate_sector(k, basis.n_sites, new_content)
    else:
        target = basis

    rows = target.index_of(new_codes)
    cols = np.arange(basis.dim)
    return SparseOperator.from_coo(rows, cols, np.ones(basis.dim), basis, target, symmetric=False)


def basis_for(lattice: SimplexLattice, content: Optional[Sequence[int]] = None) -> Basis:
    """Sector basis for the given content, or the full basis when content is None"""
    if content is None:
        return FullBasis(lattice.k, lattice.n_sites)
    return enumerate_sector(lattice.k, lattice.n_sites, content)
