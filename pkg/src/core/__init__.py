"""
Core Module - lattice, color bases, operators, configuration
"""

from .config import Settings, configure_logging, get_settings
from .errors import (
    BasisMismatchError,
    ConvergenceError,
    DegeneracyError,
    MatryoshkaError,
    NumericalError,
    ParameterError,
    SizeCapError,
    VanishingGapError,
    VerificationError,
)
from .hilbert import (
    FullBasis,
    SectorBasis,
    SparseOperator,
    all_sectors,
    balanced_content,
    basis_for,
    bond_operator,
    color_permutation_operator,
    delta_h,
    enumerate_sector,
    hamiltonian,
    permutation_hamiltonian,
    simplex_hamiltonian,
)
from .lattice import (
    Embedding,
    SimplexLattice,
    build_lattice,
    embed_lattice,
    lattice_from_dict,
)

__all__ = [
    'Settings', 'configure_logging', 'get_settings',
    'MatryoshkaError', 'ParameterError', 'SizeCapError', 'BasisMismatchError',
    'NumericalError', 'ConvergenceError', 'DegeneracyError', 'VanishingGapError',
    'VerificationError',
    'SimplexLattice', 'Embedding', 'build_lattice', 'embed_lattice', 'lattice_from_dict',
    'FullBasis', 'SectorBasis', 'SparseOperator', 'enumerate_sector', 'all_sectors',
    'balanced_content', 'basis_for', 'bond_operator', 'hamiltonian', 'simplex_hamiltonian',
    'permutation_hamiltonian', 'delta_h', 'color_permutation_operator',
]
