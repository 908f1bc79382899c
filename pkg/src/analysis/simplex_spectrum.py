#!/usr/bin/env python3
"""
Simplex Spectrum - analytic spectra of one (k+1)-site simplex from Young diagrams

Two Hamiltonians on k+1 sites with k+1 colors are covered:
    permutation   sum of all transpositions; eigenvalue depends on the shape only
    off-diagonal  color exchange without the equal-color identity terms;
                  shifted per color content by the pair count sum_c C(n_c, 2)
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from core.eigensolver import group_eigenvalues
from core.errors import ParameterError, VerificationError
from core.hilbert import FullBasis, all_sectors, encode, simplex_hamiltonian

logger = logging.getLogger(__name__)

MAX_OFFDIAG_K = 6
MAX_ED_K = 4
MAX_YOUNG_OPERATOR_SITES = 4

Tableau = Tuple[Tuple[int, ...], ...]


# ── diagrams ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class YoungDiagram:
    rows: Tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if not rows or any(r <= 0 for r in rows):
            raise ParameterError(f"diagram rows must be positive, got {self.rows}")
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ParameterError(f"diagram rows must be weakly decreasing, got {self.rows}")
        object.__setattr__(self, 'rows', rows)

    @property
    def size(self) -> int:
        return sum(self.rows)

    @property
    def columns(self) -> Tuple[int, ...]:
        return tuple(sum(1 for r in self.rows if r > c) for c in range(self.rows[0]))

    def cells(self) -> Iterator[Tuple[int, int]]:
        for i, length in enumerate(self.rows):
            for j in range(length):
                yield i, j

    def hook(self, i: int, j: int) -> int:
        return (self.rows[i] - j - 1) + (self.columns[j] - i - 1) + 1

    def __str__(self):
        return '(' + ','.join(str(r) for r in self.rows) + ')'


def as_diagram(shape) -> YoungDiagram:
    return shape if isinstance(shape, YoungDiagram) else YoungDiagram(tuple(shape))


def partitions(n: int, max_part: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Partitions of n in reverse lexicographic order"""
    max_part = n if max_part is None else max_part
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def hook_length_count(shape) -> int:
    """f^lambda: number of standard tableaux"""
    diagram = as_diagram(shape)
    hooks = math.prod(diagram.hook(i, j) for i, j in diagram.cells())
    return math.factorial(diagram.size) // hooks


def hook_content_dim(shape, d: int) -> int:
    """Dimension of the GL(d) irrep with this shape (zero when rows > d)"""
    diagram = as_diagram(shape)
    numerator = math.prod(d + j - i for i, j in diagram.cells())
    if numerator <= 0:
        return 0
    hooks = math.prod(diagram.hook(i, j) for i, j in diagram.cells())
    return numerator // hooks


def perm_eigenvalue(shape) -> float:
    """Sum of all transpositions on the isotypic component of the shape"""
    diagram = as_diagram(shape)
    rows = sum(l * (l - 1) for l in diagram.rows)
    cols = sum(l * (l - 1) for l in diagram.columns)
    return float((rows - cols) // 2)


def _require_simplex_shape(diagram: YoungDiagram, k: int) -> None:
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if diagram.size != k + 1:
        raise ParameterError(f"diagram {diagram} is not a partition of k+1 = {k + 1}")


def perm_degeneracy(shape, k: int) -> int:
    """f^lambda * dim_GL(k+1)(lambda)"""
    diagram = as_diagram(shape)
    _require_simplex_shape(diagram, k)
    return hook_length_count(diagram) * hook_content_dim(diagram, k + 1)


def pair_count(content: Sequence[int]) -> int:
    return sum(c * (c - 1) // 2 for c in content)


def kostka(shape, content: Sequence[int]) -> int:
    """Number of semistandard tableaux of the given shape and content (backtracking)"""
    diagram = as_diagram(shape)
    content = [int(c) for c in content]
    if sum(content) != diagram.size:
        return 0

    cells = list(diagram.cells())
    grid = [[0] * length for length in diagram.rows]
    remaining = list(content)

    def place(pos: int) -> int:
        if pos == len(cells):
            return 1
        i, j = cells[pos]
        total = 0
        for value in range(1, len(remaining) + 1):
            if remaining[value - 1] == 0:
                continue
            if j > 0 and value < grid[i][j - 1]:
                continue
            if i > 0 and value <= grid[i - 1][j]:
                continue
            grid[i][j] = value
            remaining[value - 1] -= 1
            total += place(pos + 1)
            remaining[value - 1] += 1
            grid[i][j] = 0
        return total

    return place(0)


def composition_count(pattern: Sequence[int], parts: int) -> int:
    """Distinct color assignments (length-`parts` vectors) that sort to the pattern"""
    padded = list(pattern) + [0] * (parts - len(pattern))
    result = math.factorial(parts)
    for m in _multiplicities(padded).values():
        result //= math.factorial(m)
    return result


def _multiplicities(values: Sequence[int]) -> Dict[int, int]:
    counts: Dict[int, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return counts


# ── spectra ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SpectrumEntry:
    diagram: YoungDiagram
    eigenvalue: float
    degeneracy: int
    content: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class AnalyticSpectrum:
    """Eigenvalues with degeneracies; `variant` is 'permutation' or 'off-diagonal'"""

    k: int
    variant: str
    entries: Tuple[SpectrumEntry, ...]
    provenance: str = 'analytic'

    @property
    def total_degeneracy(self) -> int:
        return sum(e.degeneracy for e in self.entries)

    @property
    def trace(self) -> float:
        return sum(e.eigenvalue * e.degeneracy for e in self.entries)

    def multiplicities(self) -> Dict[float, int]:
        merged: Dict[float, int] = {}
        for e in self.entries:
            merged[e.eigenvalue] = merged.get(e.eigenvalue, 0) + e.degeneracy
        return dict(sorted(merged.items()))

    def ground(self) -> SpectrumEntry:
        return min(self.entries, key=lambda e: e.eigenvalue)

    def to_frame(self) -> pd.DataFrame:
        rows = [{
            'diagram': str(e.diagram),
            'content': '' if e.content is None else '(' + ','.join(map(str, e.content)) + ')',
            'eigenvalue': e.eigenvalue,
            'degeneracy': e.degeneracy,
        } for e in self.entries]
        frame = pd.DataFrame(rows, columns=['diagram', 'content', 'eigenvalue', 'degeneracy'])
        return frame.sort_values(['eigenvalue', 'diagram', 'content'], kind='mergesort').reset_index(drop=True)


def perm_spectrum(k: int) -> AnalyticSpectrum:
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    entries = []
    for rows in partitions(k + 1):
        diagram = YoungDiagram(rows)
        entries.append(SpectrumEntry(diagram, perm_eigenvalue(diagram), perm_degeneracy(diagram, k)))
    return AnalyticSpectrum(k=k, variant='permutation', entries=tuple(entries))


def offdiag_spectrum(k: int) -> AnalyticSpectrum:
    """
    Content-resolved spectrum of the off-diagonal simplex Hamiltonian

    For shape lambda and content pattern mu (a partition of k+1 padded to
    k+1 parts) the eigenvalue is perm_eigenvalue(lambda) - sum_i C(mu_i, 2)
    and the degeneracy is f^lambda * K(lambda, mu) * (number of color
    assignments with pattern mu).
    """
    if not 1 <= k <= MAX_OFFDIAG_K:
        raise ParameterError(f"offdiag_spectrum supports 1 <= k <= {MAX_OFFDIAG_K}, got {k}")

    entries = []
    for mu in partitions(k + 1):
        padded = tuple(mu) + (0,) * (k + 1 - len(mu))
        assignments = composition_count(mu, k + 1)
        shift = pair_count(mu)
        for rows in partitions(k + 1):
            count = kostka(rows, mu)
            if count == 0:
                continue
            diagram = YoungDiagram(rows)
            entries.append(SpectrumEntry(
                diagram=diagram,
                eigenvalue=perm_eigenvalue(diagram) - shift,
                degeneracy=hook_length_count(diagram) * count * assignments,
                content=padded,
            ))
    return AnalyticSpectrum(k=k, variant='off-diagonal', entries=tuple(entries))


# ── Young operators ──────────────────────────────────────────────────────────

def standard_tableaux(shape) -> List[Tableau]:
    """All standard fillings of the shape with 1..n"""
    diagram = as_diagram(shape)
    n = diagram.size
    results: List[Tableau] = []

    def grow(rows: List[List[int]], value: int) -> None:
        if value > n:
            results.append(tuple(tuple(r) for r in rows))
            return
        for i, target in enumerate(diagram.rows):
            if len(rows[i]) < target and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(value)
                grow(rows, value + 1)
                rows[i].pop()

    grow([[] for _ in diagram.rows], 1)
    return results


def permutation_sign(mapping: Dict[int, int]) -> int:
    seen, sign = set(), 1
    for start in mapping:
        if start in seen:
            continue
        length, node = 0, start
        while node not in seen:
            seen.add(node)
            node = mapping[node]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _block_group(blocks: Sequence[Sequence[int]]) -> List[Dict[int, int]]:
    """All permutations preserving each block setwise"""
    group = []
    for images in itertools.product(*(itertools.permutations(b) for b in blocks)):
        mapping = {}
        for block, image in zip(blocks, images):
            mapping.update(zip(block, image))
        group.append(mapping)
    return group


def young_operator_state(tableau: Tableau, colors: Sequence[int], k: int) -> np.ndarray:
    """
    Apply the Young symmetrizer (column antisymmetrizer after row symmetrizer)
    of the tableau to the product state |colors>, where colors[s-1] is the
    color of site s. Returns the normalized full-basis vector, or zeros when
    the image vanishes.
    """
    rows = [tuple(r) for r in tableau]
    n = sum(len(r) for r in rows)
    if n > MAX_YOUNG_OPERATOR_SITES:
        raise ParameterError(f"Young operators are limited to n <= {MAX_YOUNG_OPERATOR_SITES} sites")
    if sorted(v for r in rows for v in r) != list(range(1, n + 1)):
        raise ParameterError(f"tableau must be filled with 1..{n}, got {tableau}")
    if len(colors) != n or any(not 0 <= c <= k for c in colors):
        raise ParameterError(f"need {n} colors in 0..{k}, got {list(colors)}")

    columns = [tuple(r[j] for r in rows if len(r) > j) for j in range(len(rows[0]))]

    def act(mapping: Dict[int, int], state: Tuple[int, ...]) -> Tuple[int, ...]:
        moved = [0] * n
        for s in range(1, n + 1):
            moved[mapping[s] - 1] = state[s - 1]
        return tuple(moved)

    symmetrized: Dict[Tuple[int, ...], float] = {}
    for p in _block_group(rows):
        image = act(p, tuple(colors))
        symmetrized[image] = symmetrized.get(image, 0.0) + 1.0

    result: Dict[Tuple[int, ...], float] = {}
    for q in _block_group(columns):
        sign = permutation_sign(q)
        for state, amp in symmetrized.items():
            image = act(q, state)
            result[image] = result.get(image, 0.0) + sign * amp

    basis = FullBasis(k, n)
    vector = np.zeros(basis.dim)
    states = [s for s, a in result.items() if a != 0.0]
    if states:
        codes = encode(np.array(states), k)
        vector[codes] = [result[s] for s in states]
    norm = np.linalg.norm(vector)
    return vector / norm if norm > 0 else vector


# ── cross-check against exact diagonalization ────────────────────────────────

@dataclass
class VerificationReport:
    """ED multiplicities of both variants, content-resolved check summary"""

    k: int
    permutation: Dict[float, int]
    off_diagonal: Dict[float, int]
    sectors_checked: int
    max_residual: float
    passed: bool = True


def _expected_sector_levels(k: int, content: Tuple[int, ...], offset: float) -> Dict[int, Tuple[int, List[str]]]:
    """eigenvalue -> (multiplicity, contributing diagrams) for one sector"""
    mu = tuple(sorted((c for c in content if c > 0), reverse=True))
    levels: Dict[int, Tuple[int, List[str]]] = {}
    for rows in partitions(k + 1):
        count = kostka(rows, mu)
        if count == 0:
            continue
        diagram = YoungDiagram(rows)
        value = int(perm_eigenvalue(diagram) - pair_count(mu) + offset)
        mult, names = levels.get(value, (0, []))
        levels[value] = (mult + hook_length_count(diagram) * count, names + [str(diagram)])
    return levels


def verify_against_ed(k: int, tol: float = 1e-10) -> VerificationReport:
    """
    Dense-diagonalize both single-simplex variants sector by sector and
    compare with the Young-diagram prediction.

    Raises:
        VerificationError naming (lambda, mu) on the first mismatch
    """
    if not 1 <= k <= MAX_ED_K:
        raise ParameterError(f"verify_against_ed supports 1 <= k <= {MAX_ED_K}, got {k}")

    permutation: Dict[float, int] = {}
    off_diagonal: Dict[float, int] = {}
    max_residual = 0.0
    sectors = all_sectors(k, k + 1)

    for basis in sectors:
        mu = tuple(sorted((c for c in basis.content if c > 0), reverse=True))
        shift = pair_count(basis.content)
        ed_values = np.linalg.eigvalsh(simplex_hamiltonian(basis, range(1, k + 2)).toarray())

        for variant, offset, merged in (('off-diagonal', 0.0, off_diagonal),
                                        ('permutation', float(shift), permutation)):
            expected = _expected_sector_levels(k, basis.content, offset)
            observed = group_eigenvalues(ed_values + offset, tol=1e-6)

            for value, mult in observed:
                target = int(round(value))
                residual = abs(value - target)
                max_residual = max(max_residual, residual)
                exp_mult, names = expected.get(target, (0, []))
                if residual > tol or mult != exp_mult:
                    raise VerificationError(
                        f"{variant} k={k}: lambda={'/'.join(names) or '?'} mu={mu} "
                        f"eigenvalue {value:.12g} x{mult}, expected {target} x{exp_mult}",
                        residual=residual)
                merged[float(target)] = merged.get(float(target), 0) + mult

            if sum(m for m, _ in expected.values()) != basis.dim:
                raise VerificationError(f"{variant} k={k}: mu={mu} analytic count does not fill the sector")

    analytic_perm = perm_spectrum(k).multiplicities()
    if dict(sorted(permutation.items())) != analytic_perm:
        raise VerificationError(f"permutation k={k}: ED {permutation} != analytic {analytic_perm}")

    logger.info(f"✅ Simplex spectrum k={k} verified on {len(sectors)} sectors "
                f"(max residual {max_residual:.2e})")
    return VerificationReport(
        k=k,
        permutation=dict(sorted(permutation.items())),
        off_diagonal=dict(sorted(off_diagonal.items())),
        sectors_checked=len(sectors),
        max_residual=max_residual,
    )
