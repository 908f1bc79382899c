#!/usr/bin/env python3
"""
Lattice Builder - nested k-simplex ("matryoshka") lattice

Layer n holds k+1 sites with ids (n-1)(k+1)+1 .. n(k+1). Only layer 1 has
intra-layer bonds (coupling 1). A site with local index a in layer n+1 is
bonded to every site of layer n except the one with local index a, all with
coupling J_n = sqrt((k+1)!) * alpha**(n - 1/2).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Site:
    id: int
    layer: int
    local: int


@dataclass(frozen=True)
class Bond:
    i: int
    j: int
    coupling: float


@dataclass(frozen=True)
class SimplexLattice:
    """Immutable nested-simplex lattice with layer-indexed couplings"""

    k: int
    layers: int
    alpha: float
    sites: Tuple[Site, ...]
    bonds: Tuple[Bond, ...]
    warnings: Tuple[str, ...] = ()

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def local_dim(self) -> int:
        return self.k + 1

    @property
    def flat_point(self) -> float:
        """alpha at which J_1 equals the layer-1 coupling"""
        return 1.0 / math.factorial(self.k + 1)

    def site_id(self, layer: int, local: int) -> int:
        return (layer - 1) * (self.k + 1) + local

    def layer_sites(self, layer: int) -> List[int]:
        if not 1 <= layer <= self.layers:
            raise ParameterError(f"layer must be in 1..{self.layers}, got {layer}")
        return [self.site_id(layer, a) for a in range(1, self.k + 2)]

    def inter_layer_coupling(self, n: int) -> float:
        """J_n between layers n and n+1 (n = 1..N-1)"""
        if not 1 <= n < self.layers:
            raise ParameterError(f"inter-layer index must be in 1..{self.layers - 1}, got {n}")
        return inter_layer_coupling(self.k, self.alpha, n)

    def inter_layer_bonds(self, n: int) -> List[Bond]:
        lower = set(self.layer_sites(n))
        upper = set(self.layer_sites(n + 1))
        return [b for b in self.bonds
                if (b.i in lower and b.j in upper) or (b.j in lower and b.i in upper)]

    def intra_layer_bonds(self) -> List[Bond]:
        inner = set(self.layer_sites(1))
        return [b for b in self.bonds if b.i in inner and b.j in inner]

    def without_inter_layer_bonds(self) -> 'SimplexLattice':
        """Decoupled copy (the alpha -> 0 limit): layer-1 bonds only"""
        return SimplexLattice(
            k=self.k,
            layers=self.layers,
            alpha=self.alpha,
            sites=self.sites,
            bonds=tuple(self.intra_layer_bonds()),
            warnings=self.warnings + ('inter-layer bonds removed',),
        )

    def to_dict(self, embedding: Optional['Embedding'] = None) -> Dict:
        data = {
            'k': self.k,
            'layers': self.layers,
            'alpha': self.alpha,
            'sites': [{'id': s.id, 'layer': s.layer, 'local': s.local} for s in self.sites],
            'bonds': [{'i': b.i, 'j': b.j, 'coupling': b.coupling} for b in self.bonds],
        }
        if self.warnings:
            data['warnings'] = list(self.warnings)
        if embedding is not None:
            data['embedding'] = {str(sid): coords for sid, coords in embedding.as_dict().items()}
        return data


@dataclass(frozen=True)
class Embedding:
    """Site coordinates in R^k; row s-1 belongs to site id s"""

    k: int
    coordinates: np.ndarray = field(repr=False)

    def position(self, site_id: int) -> np.ndarray:
        return self.coordinates[site_id - 1]

    def as_dict(self) -> Dict[int, List[float]]:
        return {sid + 1: [float(x) for x in row] for sid, row in enumerate(self.coordinates)}


def inter_layer_coupling(k: int, alpha: float, n: int) -> float:
    return math.sqrt(math.factorial(k + 1)) * alpha ** (n - 0.5)


def validate_parameters(k: int, layers: int, alpha: float) -> None:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ParameterError(f"k must be an integer >= 1, got {k!r}")
    if isinstance(layers, bool) or not isinstance(layers, (int, np.integer)) or layers < 1:
        raise ParameterError(f"layers must be an integer >= 1, got {layers!r}")
    if not isinstance(alpha, (int, float, np.floating)) or not 0.0 < float(alpha) < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha!r}")


def build_lattice(k: int, layers: int, alpha: float) -> SimplexLattice:
    """
    Build the nested k-simplex lattice

    Args:
        k: simplex dimension (local Hilbert dimension k+1)
        layers: number of nested simplices N
        alpha: inhomogeneity parameter in (0, 1)

    Returns:
        SimplexLattice with sites ascending and bonds sorted by (min id, max id)
    """
    validate_parameters(k, layers, alpha)
    k, layers, alpha = int(k), int(layers), float(alpha)
    width = k + 1

    sites = tuple(
        Site(id=(n - 1) * width + a, layer=n, local=a)
        for n in range(1, layers + 1)
        for a in range(1, width + 1)
    )

    pairs: Dict[Tuple[int, int], float] = {}
    for a in range(1, width + 1):
        for b in range(a + 1, width + 1):
            pairs[(a, b)] = 1.0

    for n in range(1, layers):
        coupling = inter_layer_coupling(k, alpha, n)
        for a in range(1, width + 1):
            outer = n * width + a
            for b in range(1, width + 1):
                if b == a:
                    continue
                inner = (n - 1) * width + b
                pairs[(min(inner, outer), max(inner, outer))] = coupling

    bonds = tuple(Bond(i, j, c) for (i, j), c in sorted(pairs.items()))

    warnings = ()
    flat_point = 1.0 / math.factorial(width)
    if layers > 1 and alpha >= flat_point:
        warnings = (f"alpha={alpha:g} is at or beyond the flat point 1/(k+1)! = {flat_point:.6g}; "
                    "perturbation theory is not controlled",)
        logger.warning(f"⚠️  {warnings[0]}")

    logger.debug(f"Built lattice k={k} N={layers}: {len(sites)} sites, {len(bonds)} bonds")
    return SimplexLattice(k=k, layers=layers, alpha=alpha, sites=sites, bonds=bonds,
                          warnings=warnings)


def lattice_from_dict(data: Dict) -> SimplexLattice:
    """Rebuild a lattice from its JSON form; bonds are regenerated, then cross-checked"""
    lattice = build_lattice(int(data['k']), int(data['layers']), float(data['alpha']))
    if 'bonds' in data:
        given = sorted((min(b['i'], b['j']), max(b['i'], b['j'])) for b in data['bonds'])
        expected = [(b.i, b.j) for b in lattice.bonds]
        if given != expected:
            raise ParameterError("bond list does not match the nested-simplex adjacency")
    return lattice


def regular_simplex(k: int) -> np.ndarray:
    """(k+1) x k vertices of a regular k-simplex, centroid at origin, circumradius 1"""
    vertices = np.eye(k + 1) - 1.0 / (k + 1)
    # orthonormal basis of the sum-zero hyperplane
    _, _, vt = np.linalg.svd(vertices)
    coords = vertices @ vt[:k].T
    radius = np.linalg.norm(coords[0])
    return coords / radius


def embed_lattice(lattice: SimplexLattice) -> Embedding:
    """
    Place each layer on a regular k-simplex centered at the origin.

    Layer-n vertex b sits on the centroid of the layer-(n+1) facet opposite
    vertex b. For a centered simplex that facet centroid is -w_b / k, so each
    layer is the previous one scaled by -k. Layer 1 has circumradius 1.
    """
    k = lattice.k
    base = regular_simplex(k)
    blocks = [base * (-k) ** (n - 1) for n in range(1, lattice.layers + 1)]
    return Embedding(k=k, coordinates=np.vstack(blocks))
