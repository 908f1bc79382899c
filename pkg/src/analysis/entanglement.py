#!/usr/bin/env python3
"""
Entanglement - layer-singlet ground states, Schmidt decompositions, fidelities

The analytic ground state is a product over layers of (k+1)-site
antisymmetrizers. Schmidt values come from the SVD of the amplitude matrix
between a site set A and its complement, built only from occupied rows and
columns so sector states never need the full product space.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.special import entr

from core.config import get_settings
from core.eigensolver import ground_cluster, lowest_eigenpairs, resolve_solver, residual_norm
from core.errors import (BasisMismatchError, ConvergenceError, DegeneracyError, ParameterError,
                         VerificationError)
from core.hilbert import (ColorBasis, FullBasis, balanced_content, bond_operator, decode, encode,
                          enumerate_sector, hamiltonian, site_weights)
from core.lattice import SimplexLattice, build_lattice

from .sdrg import fit_loglog_slope
from .simplex_spectrum import permutation_sign

logger = logging.getLogger(__name__)

SCHMIDT_CUTOFF = 1e-14
DEGENERACY_TOL = 1e-8
GROUND_PROBE = 6


@dataclass
class StateVector:
    """Real amplitudes over a color basis"""

    basis: ColorBasis
    amplitudes: np.ndarray = field(repr=False)
    norm_deviation: float = 0.0
    ground_degeneracy: int = 1

    @classmethod
    def normalized(cls, basis: ColorBasis, amplitudes: np.ndarray, ground_degeneracy: int = 1) -> 'StateVector':
        amplitudes = np.asarray(amplitudes, dtype=np.float64)
        if amplitudes.shape != (basis.dim,):
            raise BasisMismatchError(f"amplitude length {amplitudes.shape} != basis dim {basis.dim}")
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise ParameterError("cannot normalize the zero vector")
        amplitudes = amplitudes / norm
        deviation = abs(1.0 - float(amplitudes @ amplitudes))
        return cls(basis, amplitudes, deviation, ground_degeneracy)

    @property
    def tag(self) -> Tuple:
        return self.basis.tag

    @property
    def n_sites(self) -> int:
        return self.basis.n_sites

    def nonzero(self) -> Tuple[np.ndarray, np.ndarray]:
        """(codes, amplitudes) of the occupied configurations"""
        idx = np.nonzero(self.amplitudes)[0]
        return self.basis.codes[idx], self.amplitudes[idx]


# ── cuts ─────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Cut:
    sites: FrozenSet[int]
    descriptor: str
    kind: str = 'explicit'

    def complement(self, n_sites: int) -> List[int]:
        return [s for s in range(1, n_sites + 1) if s not in self.sites]


def _checked_cut(sites, n_sites: int, descriptor: str, kind: str) -> Cut:
    sites = frozenset(int(s) for s in sites)
    if any(not 1 <= s <= n_sites for s in sites):
        raise ParameterError(f"cut {descriptor!r} has sites outside 1..{n_sites}")
    if not sites or len(sites) == n_sites:
        raise ParameterError(f"cut {descriptor!r} must be a nonempty proper subset of the {n_sites} sites")
    return Cut(sites, descriptor, kind)


def _int_list(text: str, descriptor: str) -> List[int]:
    try:
        return [int(v) for v in text.split(',') if v.strip() != '']
    except ValueError:
        raise ParameterError(f"cannot parse integers in cut {descriptor!r}")


def parse_cut(descriptor: str, k: int, layers: int) -> Cut:
    """
    Parse a cut descriptor

        even-odd          local index 2 of every layer
        concentric:L      layers 1..L
        radial:m1,...,mN  first m_n sites of layer n
        sites:i,j,...     explicit site ids
    """
    width = k + 1
    n_sites = width * layers
    kind, _, arg = descriptor.strip().partition(':')

    if kind == 'even-odd' and not arg:
        return _checked_cut([(n - 1) * width + 2 for n in range(1, layers + 1)], n_sites, descriptor, 'even-odd')
    if kind == 'concentric':
        boundary = _int_list(arg, descriptor)
        if len(boundary) != 1 or not 1 <= boundary[0] < layers:
            raise ParameterError(f"concentric boundary must be one layer in 1..{layers - 1}, got {arg!r}")
        return _checked_cut(range(1, boundary[0] * width + 1), n_sites, descriptor, 'concentric')
    if kind == 'radial':
        m = _int_list(arg, descriptor)
        _check_radial(m, k, layers)
        sites = [(n - 1) * width + a for n, m_n in enumerate(m, start=1) for a in range(1, m_n + 1)]
        return _checked_cut(sites, n_sites, descriptor, 'radial')
    if kind == 'sites':
        return _checked_cut(_int_list(arg, descriptor), n_sites, descriptor, 'explicit')
    raise ParameterError(f"unknown cut {descriptor!r}; use even-odd, concentric:L, radial:m1,..., or sites:i,...")


def _check_radial(m_per_layer: Sequence[int], k: int, layers: int) -> None:
    if len(m_per_layer) != layers:
        raise ParameterError(f"radial cut needs one m per layer ({layers}), got {len(m_per_layer)}")
    if any(not 0 <= m <= k + 1 for m in m_per_layer):
        raise ParameterError(f"radial m values must lie in 0..{k + 1}, got {list(m_per_layer)}")


# ── states ───────────────────────────────────────────────────────────────────

def _singlet_terms(k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Codes and signs of the unnormalized (k+1)-site antisymmetrizer"""
    perms = np.array(list(itertools.permutations(range(k + 1))), dtype=np.int64)
    signs = np.array([permutation_sign(dict(enumerate(p))) for p in perms], dtype=np.float64)
    return encode(perms, k), signs


def analytic_ground_state(k: int, layers: int, full_basis: bool = False) -> StateVector:
    """
    Product over layers of the normalized antisymmetrizer

    The sign is + for colors 0..k on ascending site ids in every layer.
    The state lives in the balanced sector unless full_basis is set.
    """
    if k < 1 or layers < 1:
        raise ParameterError(f"need k >= 1 and layers >= 1, got k={k}, layers={layers}")
    n_sites = (k + 1) * layers
    basis = FullBasis(k, n_sites) if full_basis else enumerate_sector(k, n_sites, balanced_content(k, layers))

    layer_codes, layer_signs = _singlet_terms(k)
    stride = (k + 1) ** (k + 1)
    codes, amps = np.zeros(1, dtype=np.int64), np.ones(1)
    for _ in range(layers):
        codes = (codes[:, None] * stride + layer_codes[None, :]).ravel()
        amps = (amps[:, None] * layer_signs[None, :]).ravel()

    vector = np.zeros(basis.dim)
    vector[basis.index_of(codes)] = amps / math.sqrt(math.factorial(k + 1)) ** layers
    return StateVector.normalized(basis, vector)


@dataclass
class GroundState:
    energy: float
    state: StateVector
    degeneracy: int
    residual: float
    solver: str

    @property
    def degenerate(self) -> bool:
        return self.degeneracy > 1


def _lattice_basis(lattice: SimplexLattice, content: Optional[Sequence[int]], full_basis: bool) -> ColorBasis:
    if full_basis:
        if content is not None:
            raise ParameterError("choose either a content sector or the full basis")
        return FullBasis(lattice.k, lattice.n_sites)
    content = balanced_content(lattice.k, lattice.layers) if content is None else content
    return enumerate_sector(lattice.k, lattice.n_sites, content)


def exact_ground_state(
    lattice: SimplexLattice,
    content: Optional[Sequence[int]] = None,
    solver: str = 'auto',
    seed: Optional[int] = None,
    full_basis: bool = False,
    tol: Optional[float] = None,
) -> GroundState:
    """
    Lowest eigenpair of the lattice Hamiltonian in one color sector

    Args:
        lattice: nested-simplex lattice
        content: color counts; balanced (each color N times) by default
        solver: 'auto' | 'dense' | 'iterative'
        seed: Lanczos start-vector seed
        full_basis: solve on all (k+1)^n configurations instead of a sector
        tol: residual tolerance relative to max(1, |E0|)

    Returns:
        GroundState; degeneracy > 1 is flagged, not raised
    """
    basis = _lattice_basis(lattice, content, full_basis)
    H = hamiltonian(lattice, basis)
    method = resolve_solver(solver, basis.dim)
    count = basis.dim if method == 'dense' else min(GROUND_PROBE, basis.dim)

    values, vectors = lowest_eigenpairs(H, count, solver=method, seed=seed)
    energy = float(values[0])
    psi = vectors[:, 0]
    residual = residual_norm(H, energy, psi)
    tol = get_settings().tol if tol is None else tol
    limit = max(tol, 1e-10) * max(1.0, abs(energy))
    if residual > limit:
        raise ConvergenceError(f"ground-state residual {residual:.3e} exceeds {limit:.1e}")

    degeneracy = ground_cluster(values, DEGENERACY_TOL)
    if degeneracy > 1:
        logger.warning(f"⚠️  Ground state of {basis!r} is {degeneracy}-fold degenerate at E0={energy:.12g}")
    logger.info(f"Ground state {method}: dim={basis.dim} E0={energy:.12g} residual={residual:.2e}")
    return GroundState(
        energy=energy,
        state=StateVector.normalized(basis, psi, ground_degeneracy=degeneracy),
        degeneracy=degeneracy,
        residual=residual,
        solver=method,
    )


def lowest_eigenvalues(lattice: SimplexLattice, count: int, content: Optional[Sequence[int]] = None,
                       solver: str = 'auto', seed: Optional[int] = None,
                       full_basis: bool = False) -> np.ndarray:
    basis = _lattice_basis(lattice, content, full_basis)
    values, _ = lowest_eigenpairs(hamiltonian(lattice, basis), min(count, basis.dim),
                                  solver=solver, seed=seed, want_vectors=False)
    return values


# ── Schmidt decomposition ────────────────────────────────────────────────────

@dataclass
class SchmidtResult:
    cut: Cut
    schmidt_values: np.ndarray
    entropy: float

    @property
    def rank(self) -> int:
        return int(len(self.schmidt_values))

    def entropy_in_base(self, base: float) -> float:
        return self.entropy / math.log(base)


def _subsystem_codes(colors: np.ndarray, sites: Sequence[int], k: int) -> np.ndarray:
    if not sites:
        return np.zeros(colors.shape[0], dtype=np.int64)
    return encode(colors[:, [s - 1 for s in sites]], k)


def schmidt(state: StateVector, cut: Cut) -> SchmidtResult:
    """
    Schmidt values and entanglement entropy (natural log) for A = cut.sites

    Raises:
        DegeneracyError: state is one of several degenerate ground states
    """
    n_sites = state.n_sites
    if any(not 1 <= s <= n_sites for s in cut.sites) or not cut.sites or len(cut.sites) == n_sites:
        raise ParameterError(f"cut {cut.descriptor!r} is not a nonempty proper subset of 1..{n_sites}")
    if state.ground_degeneracy > 1:
        raise DegeneracyError(
            f"ground state is {state.ground_degeneracy}-fold degenerate; entropy is not well defined")

    k = state.basis.k
    codes, amps = state.nonzero()
    colors = decode(codes, k, n_sites)
    a_rows, a_idx = np.unique(_subsystem_codes(colors, sorted(cut.sites), k), return_inverse=True)
    b_rows, b_idx = np.unique(_subsystem_codes(colors, cut.complement(n_sites), k), return_inverse=True)

    matrix = np.zeros((len(a_rows), len(b_rows)))
    matrix[a_idx, b_idx] = amps
    values = scipy.linalg.svdvals(matrix)
    values = values[values > SCHMIDT_CUTOFF * max(values[0], 1.0)]

    weights = values ** 2
    if abs(weights.sum() - 1.0) > 1e-10:
        raise VerificationError(f"Schmidt weights sum to {weights.sum():.15g}", residual=abs(weights.sum() - 1.0))
    entropy = float(np.sum(entr(weights)))
    return SchmidtResult(cut=cut, schmidt_values=values, entropy=max(entropy, 0.0))


def radial_entropy(k: int, layers: int, m_per_layer: Sequence[int], verify: bool = False) -> float:
    """
    sum_n ln C(k+1, m_n) on the analytic state; with verify, also runs the
    explicit Schmidt decomposition and raises on disagreement
    """
    _check_radial(m_per_layer, k, layers)
    value = float(sum(math.log(math.comb(k + 1, m)) for m in m_per_layer))
    if verify:
        width = k + 1
        if all(m in (0, width) for m in m_per_layer):
            return value
        cut = parse_cut('radial:' + ','.join(map(str, m_per_layer)), k, layers)
        direct = schmidt(analytic_ground_state(k, layers), cut).entropy
        if abs(direct - value) > 1e-12:
            raise VerificationError(f"radial entropy {value:.15g} != Schmidt {direct:.15g}",
                                    residual=abs(direct - value))
    return value


def layer_cut_entropy(k: int, m: int) -> float:
    """Entropy of the first m sites of one simplex singlet, by direct partial trace"""
    if not 0 <= m <= k + 1:
        raise ParameterError(f"m must lie in 0..{k + 1}, got {m}")
    if m in (0, k + 1):
        return 0.0
    state = analytic_ground_state(k, 1)
    return schmidt(state, Cut(frozenset(range(1, m + 1)), f'sites:1..{m}')).entropy


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.tag != b.tag:
        raise BasisMismatchError(f"fidelity needs a common basis: {a.tag} vs {b.tag}")
    overlap = float(a.amplitudes @ b.amplitudes)
    return min(1.0, overlap * overlap)


def fidelity_scaling(k: int, layers: int, alphas: Sequence[float],
                     seed: Optional[int] = None) -> Tuple[float, List[float]]:
    """Log-log slope of 1 - fidelity(exact, analytic) against alpha"""
    reference = analytic_ground_state(k, layers)
    infidelities = []
    for alpha in alphas:
        ground = exact_ground_state(build_lattice(k, layers, alpha), seed=seed)
        infidelities.append(1.0 - fidelity(ground.state, reference))
    slope = fit_loglog_slope(alphas, infidelities)
    logger.info(f"Fidelity scaling k={k} N={layers}: slope {slope:.3f}")
    return slope, infidelities


# ── singlet identities ───────────────────────────────────────────────────────

@dataclass
class IdentityReport:
    k: int
    residuals: Dict[str, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return self.max_residual < 1e-14


def antisymmetrized(basis: FullBasis, sites: Sequence[int], colors: Sequence[int],
                    fixed: Optional[Dict[int, int]] = None) -> np.ndarray:
    """
    Unnormalized sum_pi sgn(pi) |colors permuted over sites>, with the
    listed order (colors[t] on sites[t]) carrying sign +; other sites take
    their color from `fixed`.
    """
    fixed = fixed or {}
    if len(sites) + len(fixed) != basis.n_sites:
        raise ParameterError("every site needs either a permuted or a fixed color")
    weights = site_weights(basis.k, basis.n_sites)
    base = sum(c * weights[s - 1] for s, c in fixed.items())
    vector = np.zeros(basis.dim)
    for perm in itertools.permutations(range(len(sites))):
        code = base + sum(colors[p] * weights[s - 1] for s, p in zip(sites, perm))
        vector[code] += permutation_sign(dict(enumerate(perm)))
    return vector


def _two_site(basis: FullBasis, i: int, j: int, a: int, b: int, site: int, x: int) -> np.ndarray:
    """d_ij(a, b) |x>_site = |a>_i|b>_j - |b>_i|a>_j, times |x> on the third site"""
    return antisymmetrized(basis, [i, j], [a, b], {site: x})


def singlet_identities(k: int) -> IdentityReport:
    """
    Check the exact vector identities among simplex singlets

        overcompleteness  d_12|x>_3 + d_23|x>_1 = d_13|x>_2 for x in {a, b},
                          and A_123(a,b,c) = d_12|c>_3 + d_23|c>_1 + d_31|c>_2
        reversal          exchanging two site slots flips the sign
        annihilation      sum over all simplex sites j of h_{j,m} kills A x |x>_m
        face action       sum_{j != i} h_{j,m} A x |x>_m
                            = - sum_{d != x} s_d |x>_i A_rest(colors - d) |d>_m

    Raises:
        VerificationError: any residual >= 1e-14
    """
    if k not in (2, 3):
        raise ParameterError(f"singlet identities are checked for k = 2 or 3, got {k}")
    residuals: Dict[str, float] = {}

    three = FullBasis(k, 3)
    worst = 0.0
    for a, b in itertools.combinations(range(k + 1), 2):
        for x in (a, b):
            lhs = _two_site(three, 1, 2, a, b, 3, x) + _two_site(three, 2, 3, a, b, 1, x)
            worst = max(worst, float(np.max(np.abs(lhs - _two_site(three, 1, 3, a, b, 2, x)))))
    residuals['overcompleteness'] = worst

    worst = 0.0
    for a, b, c in itertools.combinations(range(k + 1), 3):
        lhs = antisymmetrized(three, [1, 2, 3], [a, b, c])
        rhs = (_two_site(three, 1, 2, a, b, 3, c) + _two_site(three, 2, 3, a, b, 1, c)
               + _two_site(three, 3, 1, a, b, 2, c))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    residuals['triple_decomposition'] = worst

    width = k + 1
    simplex = list(range(1, width + 1))
    colors = list(range(width))
    worst = 0.0
    for i, j in itertools.combinations(range(width), 2):
        swapped = list(simplex)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        original = antisymmetrized(FullBasis(k, width), simplex, colors)
        worst = max(worst, float(np.max(np.abs(antisymmetrized(FullBasis(k, width), swapped, colors) + original))))
    pair = FullBasis(k, 2)
    worst = max(worst, float(np.max(np.abs(antisymmetrized(pair, [2, 1], [0, 1]) + antisymmetrized(pair, [1, 2], [0, 1])))))
    triple = antisymmetrized(three, [1, 2, 3], [0, 1, 2])
    worst = max(worst, float(np.max(np.abs(antisymmetrized(three, [3, 2, 1], [0, 1, 2]) + triple))))
    residuals['reversal'] = worst

    joint = FullBasis(k, width + 1)
    m = width + 1
    hops = {j: bond_operator(k, j, m, joint) for j in simplex}
    annihilation, face = 0.0, 0.0
    for x in colors:
        state = antisymmetrized(joint, simplex, colors, {m: x})
        total = sum(hops[j].matvec(state) for j in simplex)
        annihilation = max(annihilation, float(np.max(np.abs(total))))
        for i in simplex:
            lhs = sum(hops[j].matvec(state) for j in simplex if j != i)
            rest = [s for s in simplex if s != i]
            rhs = np.zeros(joint.dim)
            for d in colors:
                if d == x:
                    continue
                remaining = [c for c in colors if c != d]
                order = [d if s == i else None for s in simplex]
                fill = iter(remaining)
                order = [c if c is not None else next(fill) for c in order]
                s_d = permutation_sign(dict(enumerate(order)))
                rhs -= s_d * antisymmetrized(joint, rest, remaining, {i: x, m: d})
            face = max(face, float(np.max(np.abs(lhs - rhs))))
    residuals['annihilation'] = annihilation
    residuals['face_action'] = face

    report = IdentityReport(k=k, residuals=residuals)
    if not report.passed:
        raise VerificationError(f"singlet identity violated for k={k}: {residuals}", residual=report.max_residual)
    logger.info(f"✅ Singlet identities k={k} hold (max residual {report.max_residual:.1e})")
    return report
