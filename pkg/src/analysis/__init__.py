"""
Analysis Module - simplex spectra, RG flow, entanglement
"""

from .simplex_spectrum import (
    AnalyticSpectrum,
    YoungDiagram,
    offdiag_spectrum,
    perm_degeneracy,
    perm_eigenvalue,
    perm_spectrum,
    verify_against_ed,
)
from .sdrg import (
    EffectiveHamiltonian,
    RGStepReport,
    effective_flow,
    ground_projector,
    rg_step,
    schrieffer_wolff_2nd,
)
from .entanglement import (
    Cut,
    SchmidtResult,
    StateVector,
    analytic_ground_state,
    exact_ground_state,
    fidelity,
    parse_cut,
    radial_entropy,
    schmidt,
    singlet_identities,
)

__all__ = [
    'YoungDiagram', 'AnalyticSpectrum', 'perm_eigenvalue', 'perm_degeneracy', 'perm_spectrum',
    'offdiag_spectrum', 'verify_against_ed',
    'EffectiveHamiltonian', 'RGStepReport', 'ground_projector', 'schrieffer_wolff_2nd',
    'rg_step', 'effective_flow',
    'StateVector', 'Cut', 'SchmidtResult', 'parse_cut', 'analytic_ground_state',
    'exact_ground_state', 'schmidt', 'radial_entropy', 'fidelity', 'singlet_identities',
]
