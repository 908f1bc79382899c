#!/usr/bin/env python3
"""
SDRG - second-order Schrieffer-Wolff elimination of one simplex layer

The strongest unfrozen layer is frozen into its singlet and the next layer
out inherits an all-to-all coupling J~ plus a constant energy shift. Both
are fitted from the numeric effective Hamiltonian. The closed form
J_n^2 / ((k+1)! J~_{n-1}) is only reported next to the fit: it holds for
triangles, while tetrahedra come out at J_n^2 / (18 J~_{n-1}).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from core.config import get_settings
from core.eigensolver import ground_cluster, lowest_eigenpairs
from core.errors import (BasisMismatchError, DegeneracyError, NumericalError,
                         ParameterError, VanishingGapError)
from core.hilbert import (FullBasis, SparseOperator, balanced_content, bond_sum,
                          enumerate_sector, hamiltonian, simplex_hamiltonian)
from core.lattice import SimplexLattice, build_lattice

logger = logging.getLogger(__name__)

REMAINDER_ALPHAS = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


def ground_projector(H0: SparseOperator, tol: Optional[float] = None,
                     max_degeneracy: Optional[int] = None) -> Tuple[float, np.ndarray]:
    """
    Ground energy and orthonormal ground-space basis of H0

    Args:
        H0: symmetric operator
        tol: eigenvalues within tol of the minimum count as ground states
        max_degeneracy: largest ground space accepted (default from settings)

    Returns:
        (E0, vectors) with one ground state per column

    Raises:
        DegeneracyError: ground space larger than max_degeneracy
    """
    settings = get_settings()
    tol = settings.tol if tol is None else tol
    cap = settings.max_ground_degeneracy if max_degeneracy is None else max_degeneracy
    if cap < 1:
        raise ParameterError(f"max_degeneracy must be >= 1, got {cap}")

    count = min(cap + 1, H0.dim)
    values, vectors = lowest_eigenpairs(H0, count)
    degeneracy = ground_cluster(values, tol)
    if degeneracy > cap:
        raise DegeneracyError(
            f"ground space of dimension >= {degeneracy} exceeds cap {cap} (E0={values[0]:.12g})")
    return float(values[0]), vectors[:, :degeneracy]


@dataclass
class EffectiveHamiltonian:
    """
    Second-order effective Hamiltonian on (ground space of H0) x (outer sites)

    Row/column index = g * outer_dim + x for ground vector g and outer code x.
    `first_order` and `second_order` are the coupling-free blocks, so
    matrix = E0 + J * first_order + J**2 * second_order.
    """

    k: int
    layer: int
    coupling: float
    ground_energy: float
    gap: float
    outer_sites: int
    matrix: np.ndarray = field(repr=False)
    first_order: np.ndarray = field(repr=False)
    second_order: np.ndarray = field(repr=False)
    perturbative_ratio: float = math.inf

    @property
    def inner_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def outer_dim(self) -> int:
        return (self.k + 1) ** self.outer_sites

    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))


def _max_row_norm(op: SparseOperator) -> float:
    csr = op.to_csr()
    squares = csr.multiply(csr).sum(axis=1)
    return float(np.sqrt(np.max(squares))) if csr.nnz else 0.0


def _reachable_resolvent(h0: sp.csr_matrix, rows: np.ndarray, e0: float, tol: float) -> Tuple[sp.csr_matrix, float]:
    """
    R = sum over excited eigenspaces E of P_E / (E0 - E), restricted to the
    invariant blocks of H0 that contain the given rows. Returns (R, gap) where
    gap is the lowest reachable excitation energy above E0.
    """
    n_blocks, labels = connected_components(h0 != 0, directed=False)
    wanted = np.unique(labels[rows])
    blocks_r, blocks_c, blocks_v = [], [], []
    gap = math.inf

    for label in wanted:
        idx = np.nonzero(labels == label)[0]
        block = h0[idx][:, idx].toarray()
        values, vectors = np.linalg.eigh(block)
        excited = values - e0 > tol
        if np.any(excited):
            gap = min(gap, float(np.min(values[excited] - e0)))
        # projector-weighted sum; degenerate eigenspaces need no basis choice
        weights = np.where(excited, 1.0 / (e0 - values), 0.0)
        resolvent = (vectors * weights) @ vectors.T
        r, c = np.meshgrid(idx, idx, indexing='ij')
        blocks_r.append(r.ravel())
        blocks_c.append(c.ravel())
        blocks_v.append(resolvent.ravel())

    dim = h0.shape[0]
    if not blocks_r:
        return sp.csr_matrix((dim, dim)), gap
    R = sp.coo_matrix((np.concatenate(blocks_v), (np.concatenate(blocks_r), np.concatenate(blocks_c))),
                      shape=(dim, dim)).tocsr()
    R.eliminate_zeros()
    logger.debug(f"Resolvent on {len(wanted)} of {n_blocks} invariant blocks, nnz={R.nnz}")
    return R, gap


def schrieffer_wolff_2nd(H0: SparseOperator, V: SparseOperator, J: float,
                         tol: Optional[float] = None, layer: int = 1,
                         max_degeneracy: Optional[int] = None) -> EffectiveHamiltonian:
    """
    Second-order Schrieffer-Wolff effective Hamiltonian

    H0 acts on the leading sites of V's basis (H0 x identity on the rest);
    both must be full bases over the same colors.

        H_eff = E0 + J P0 V P0 + J^2 P0 V R V P0,  R = (1 - P0) / (E0 - H0)

    Raises:
        BasisMismatchError: H0 and V do not share colors / leading sites
        VanishingGapError: no excitation separates the ground space
    """
    tol = get_settings().tol if tol is None else tol
    if not isinstance(H0.basis, FullBasis) or not isinstance(V.basis, FullBasis):
        raise BasisMismatchError("schrieffer_wolff_2nd needs full bases for H0 and V")
    if H0.basis.k != V.basis.k or H0.basis.n_sites >= V.basis.n_sites:
        raise BasisMismatchError(
            f"H0 basis {H0.basis.tag} must cover leading sites of V basis {V.basis.tag}")
    if J < 0 or not math.isfinite(J):
        raise ParameterError(f"coupling J must be finite and >= 0, got {J}")

    k = H0.basis.k
    outer_sites = V.basis.n_sites - H0.basis.n_sites
    d_in, d_out = H0.dim, (k + 1) ** outer_sites

    all_values = np.linalg.eigvalsh(H0.toarray())
    # tolerances are relative to the spectral radius of H0
    tol = tol * (float(np.max(np.abs(all_values))) or 1.0)
    e0, ground = ground_projector(H0, tol=tol, max_degeneracy=max_degeneracy)
    excited = all_values[all_values - e0 > tol]
    if excited.size == 0 or excited[0] - e0 < 1e3 * tol:
        raise VanishingGapError(f"no spectral gap above E0={e0:.12g} in H0 (dim {d_in})")
    gap = float(excited[0] - e0)

    G = sp.kron(sp.csr_matrix(ground), sp.identity(d_out, format='csr'), format='csr')
    W = (V.to_csr() @ G).tocsr()
    first = (G.T @ W).toarray()

    rows = np.unique(W.nonzero()[0] // d_out)
    R, reachable_gap = _reachable_resolvent(H0.to_csr(), rows, e0, tol)
    RW = sp.kron(R, sp.identity(d_out, format='csr'), format='csr') @ W
    second = (W.T @ RW).toarray()
    second = 0.5 * (second + second.T)

    matrix = e0 * np.eye(first.shape[0]) + J * first + J ** 2 * second
    norm = _max_row_norm(V)
    ratio = gap / (J * norm) if J > 0 and norm > 0 else math.inf

    logger.debug(f"SW layer {layer}: E0={e0:.12g} gap={gap:.6g} reachable gap={reachable_gap:.6g} "
                 f"dim={matrix.shape[0]}")
    return EffectiveHamiltonian(
        k=k, layer=layer, coupling=float(J), ground_energy=e0, gap=gap,
        outer_sites=outer_sites, matrix=matrix, first_order=first, second_order=second,
        perturbative_ratio=ratio,
    )


@dataclass
class RGStepReport:
    layer: int
    coupling: float
    inner_coupling: float
    renormalized_coupling: float
    constant_shift: float
    deviation: float
    gap: float
    predicted_coupling: float
    perturbative_ratio: float
    warnings: List[str] = field(default_factory=list)

    @property
    def relative_deviation(self) -> float:
        """(J~ - predicted) / predicted"""
        return (self.renormalized_coupling - self.predicted_coupling) / self.predicted_coupling

    def to_dict(self) -> Dict:
        return {
            'layer': self.layer,
            'J': self.coupling,
            'J_inner': self.inner_coupling,
            'J_tilde': self.renormalized_coupling,
            'J_tilde_predicted': self.predicted_coupling,
            'J_tilde_relative_deviation': self.relative_deviation,
            'shift': self.constant_shift,
            'deviation': self.deviation,
            'gap': self.gap,
            'perturbative_ratio': self.perturbative_ratio,
            'warnings': list(self.warnings),
        }


def step_operators(k: int, inner_coupling: float) -> Tuple[SparseOperator, SparseOperator]:
    """Inner simplex H0 on sites 1..k+1 and unit-coupling V to sites k+2..2(k+1)"""
    width = k + 1
    H0 = simplex_hamiltonian(FullBasis(k, width), range(1, width + 1), inner_coupling)
    joint = FullBasis(k, 2 * width)
    bonds = [(b, width + a, 1.0) for a in range(1, width + 1) for b in range(1, width + 1) if a != b]
    return H0, bond_sum(joint, bonds)


def fit_effective_form(heff: EffectiveHamiltonian) -> Tuple[float, float, float]:
    """
    Least-squares fit of H_eff - E0 to shift + J~ * sum of outer-pair exchanges

    Returns:
        (J~, shift, max-abs residual)
    """
    if heff.inner_dim != heff.outer_dim:
        raise DegeneracyError("analytic form needs a non-degenerate inner ground state")
    k = heff.k
    A = heff.matrix - heff.ground_energy * np.eye(heff.inner_dim)
    B = simplex_hamiltonian(FullBasis(k, heff.outer_sites), range(1, heff.outer_sites + 1)).toarray()
    shift = float(np.trace(A)) / heff.inner_dim
    j_tilde = float(np.sum(A * B) / np.sum(B * B))
    residual = A - shift * np.eye(heff.inner_dim) - j_tilde * B
    return j_tilde, shift, float(np.max(np.abs(residual)))


def rg_step(lattice: SimplexLattice, n: int, inner_coupling: Optional[float] = None,
            coupling: Optional[float] = None, tol: Optional[float] = None) -> RGStepReport:
    """
    Freeze layer n into its singlet and renormalize the n -> n+1 bonds

    Args:
        lattice: nested-simplex lattice
        n: layer to freeze, 1..N-1
        inner_coupling: effective all-to-all coupling of layer n; by default
            1 for n=1, otherwise taken from the preceding steps
        coupling: override for J_n (defaults to the lattice value)
        tol: ground-space tolerance passed to the Schrieffer-Wolff step
    """
    if not 1 <= n < lattice.layers:
        raise ParameterError(f"rg_step layer must be in 1..{lattice.layers - 1}, got {n}")
    k = lattice.k

    if inner_coupling is None:
        inner_coupling = 1.0
        for m in range(1, n):
            inner_coupling = rg_step(lattice, m, inner_coupling, tol=tol).renormalized_coupling
    if not inner_coupling > 0:
        raise NumericalError(f"inner coupling of layer {n} is not positive ({inner_coupling})")

    J = lattice.inter_layer_coupling(n) if coupling is None else float(coupling)
    H0, V = step_operators(k, inner_coupling)
    heff = schrieffer_wolff_2nd(H0, V, J, tol=tol, layer=n)
    j_tilde, shift, deviation = fit_effective_form(heff)

    warnings = list(lattice.warnings)
    if heff.perturbative_ratio <= 1.0:
        message = (f"layer {n}: gap/coupling ratio {heff.perturbative_ratio:.3g} <= 1, "
                   "outside the perturbative regime")
        warnings.append(message)
        logger.warning(f"⚠️  {message}")

    predicted = J ** 2 / (math.factorial(k + 1) * inner_coupling)
    logger.info(f"RG step {n}: J={J:.6g} J~={j_tilde:.6g} (closed form {predicted:.6g}) "
                f"shift={shift:.6g} deviation={deviation:.2e}")
    return RGStepReport(
        layer=n,
        coupling=J,
        inner_coupling=float(inner_coupling),
        renormalized_coupling=j_tilde,
        constant_shift=shift,
        deviation=deviation,
        gap=heff.gap,
        predicted_coupling=predicted,
        perturbative_ratio=heff.perturbative_ratio,
        warnings=warnings,
    )


def effective_flow(lattice: SimplexLattice, tol: Optional[float] = None) -> List[RGStepReport]:
    """Freeze layers 1..N-1 in order, feeding each J~ into the next step"""
    if lattice.layers < 2:
        raise ParameterError(f"effective_flow needs at least 2 layers, got {lattice.layers}")
    reports = []
    inner = 1.0
    for n in range(1, lattice.layers):
        report = rg_step(lattice, n, inner_coupling=inner, tol=tol)
        reports.append(report)
        inner = report.renormalized_coupling
    return reports


def flow_couplings(reports: Sequence[RGStepReport]) -> List[float]:
    """Effective couplings of layers 1..N: (1, J~_1, J~_2, ...)"""
    return [1.0] + [r.renormalized_coupling for r in reports]


# ── remainder measurement ────────────────────────────────────────────────────

def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    xs, ys = np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.size < 2:
        raise ParameterError("log-log fit needs two or more matching points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise NumericalError("log-log fit needs strictly positive values")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def spectral_deviation(k: int, alpha: float) -> float:
    """
    Max difference between the (k+1)! lowest eigenvalues of the exact
    two-layer Hamiltonian (balanced sector) and of H_eff restricted to
    balanced outer configurations.
    """
    lattice = build_lattice(k, 2, alpha)
    count = math.factorial(k + 1)

    basis = enumerate_sector(k, lattice.n_sites, balanced_content(k, 2))
    exact, _ = lowest_eigenpairs(hamiltonian(lattice, basis), count, want_vectors=False)

    H0, V = step_operators(k, 1.0)
    heff = schrieffer_wolff_2nd(H0, V, lattice.inter_layer_coupling(1))
    outer = enumerate_sector(k, k + 1, (1,) * (k + 1))
    block = heff.matrix[np.ix_(outer.codes, outer.codes)]
    approx = np.linalg.eigvalsh(block)[:count]
    return float(np.max(np.abs(exact - approx)))


def remainder_scaling(k: int, alphas: Sequence[float] = REMAINDER_ALPHAS) -> Tuple[float, List[float]]:
    """Log-log slope of spectral_deviation against alpha"""
    deviations = [spectral_deviation(k, a) for a in alphas]
    slope = fit_loglog_slope(alphas, deviations)
    logger.info(f"Remainder scaling k={k}: slope {slope:.3f} over {len(alphas)} points")
    return slope, deviations
