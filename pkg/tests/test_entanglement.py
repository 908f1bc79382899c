import math

import numpy as np
import pytest

from analysis.entanglement import (
    Cut,
    StateVector,
    analytic_ground_state,
    exact_ground_state,
    fidelity,
    fidelity_scaling,
    layer_cut_entropy,
    lowest_eigenvalues,
    parse_cut,
    radial_entropy,
    schmidt,
    singlet_identities,
)
from core.errors import BasisMismatchError, DegeneracyError, ParameterError
from core.hilbert import encode, enumerate_sector, hamiltonian
from core.lattice import build_lattice

LN3 = math.log(3)


# -- analytic state --------------------------------------------------------

def test_single_triangle_singlet():
    state = analytic_ground_state(2, 1)
    codes, amps = state.nonzero()
    assert len(codes) == 6
    assert np.allclose(np.abs(amps), 1 / math.sqrt(6), atol=1e-15)
    identity = int(encode(np.array([[0, 1, 2]]), 2)[0])
    assert amps[list(codes).index(identity)] > 0


def test_two_layer_product_state():
    state = analytic_ground_state(2, 2)
    _, amps = state.nonzero()
    assert len(amps) == 36
    assert np.allclose(np.abs(amps), 1 / 6, atol=1e-15)
    assert state.norm_deviation < 1e-14


def test_analytic_state_energy_expectation():
    lattice = build_lattice(2, 2, 0.01)
    state = analytic_ground_state(2, 2)
    H = hamiltonian(lattice, state.basis)
    assert H.expectation(state.amplitudes) == pytest.approx(-3.0, abs=1e-12)


def test_analytic_state_on_full_basis():
    state = analytic_ground_state(2, 2, full_basis=True)
    assert state.basis.dim == 729
    assert np.count_nonzero(state.amplitudes) == 36


# -- exact ground state ----------------------------------------------------

def test_single_layer_exact_energy():
    ground = exact_ground_state(build_lattice(2, 1, 0.1))
    assert ground.energy == pytest.approx(-3.0, abs=1e-12)
    assert not ground.degenerate
    assert ground.residual < 1e-10


def test_two_layer_exact_energy():
    # the O(alpha^(3/2)) remainder still matters at alpha = 0.01
    ground = exact_ground_state(build_lattice(2, 2, 0.01))
    assert ground.state.basis.dim == 90
    assert ground.energy == pytest.approx(-3.1370065285928, abs=1e-9)


def test_two_layer_energy_approaches_second_order():
    # constant shift -6 alpha plus the outer singlet at coupling alpha
    alpha = 1e-4
    ground = exact_ground_state(build_lattice(2, 2, alpha))
    assert ground.energy == pytest.approx(-3.0009308055, abs=1e-8)
    assert abs(ground.energy - (-3 - 9 * alpha)) <= 1e-4


def test_decoupled_layers_are_degenerate():
    lattice = build_lattice(2, 2, 0.01).without_inter_layer_bonds()
    ground = exact_ground_state(lattice, full_basis=True)
    assert ground.energy == pytest.approx(-3.0, abs=1e-12)
    assert ground.degeneracy == 27
    with pytest.raises(DegeneracyError):
        schmidt(ground.state, parse_cut('even-odd', 2, 2))


def test_content_and_full_basis_are_exclusive():
    with pytest.raises(ParameterError):
        exact_ground_state(build_lattice(2, 1, 0.1), content=(1, 1, 1), full_basis=True)


def test_sector_override():
    values = lowest_eigenvalues(build_lattice(2, 1, 0.1), 3, content=(2, 1, 0))
    assert values[0] == pytest.approx(-1.0, abs=1e-12)


# -- Schmidt ---------------------------------------------------------------

def test_single_site_of_triangle():
    result = schmidt(analytic_ground_state(2, 1), parse_cut('sites:2', 2, 1))
    assert result.entropy == pytest.approx(LN3, abs=1e-14)
    assert np.allclose(result.schmidt_values, 1 / math.sqrt(3), atol=1e-15)
    assert result.rank == 3


@pytest.mark.parametrize('layers', [1, 2, 3])
def test_even_odd_cut_of_analytic_state(layers):
    result = schmidt(analytic_ground_state(2, layers), parse_cut('even-odd', 2, layers))
    assert result.entropy == pytest.approx(layers * LN3, abs=1e-12)


@pytest.mark.parametrize('layers, boundary', [(2, 1), (3, 1), (3, 2)])
def test_concentric_cuts_carry_no_entanglement(layers, boundary):
    result = schmidt(analytic_ground_state(2, layers), parse_cut(f'concentric:{boundary}', 2, layers))
    assert result.entropy < 1e-14
    assert result.rank == 1


def test_complementary_cuts_agree():
    state = analytic_ground_state(3, 2)
    a = schmidt(state, parse_cut('sites:1,2,6', 3, 2))
    b = schmidt(state, parse_cut('sites:3,4,5,7,8', 3, 2))
    assert a.entropy == pytest.approx(b.entropy, abs=1e-12)


def test_entropy_in_other_base():
    result = schmidt(analytic_ground_state(3, 2), parse_cut('radial:1,1', 3, 2))
    assert result.entropy_in_base(4) == pytest.approx(2.0, abs=1e-12)


def test_exact_state_cuts():
    ground = exact_ground_state(build_lattice(2, 2, 0.01))
    assert schmidt(ground.state, parse_cut('even-odd', 2, 2)).entropy == pytest.approx(2 * LN3 - 0.1056, abs=1e-3)
    assert schmidt(ground.state, parse_cut('concentric:1', 2, 2)).entropy == pytest.approx(0.5831, abs=1e-3)


def test_exact_state_cuts_at_weak_coupling():
    ground = exact_ground_state(build_lattice(2, 2, 1e-4))
    assert abs(schmidt(ground.state, parse_cut('even-odd', 2, 2)).entropy - 2 * LN3) <= 5e-3
    assert schmidt(ground.state, parse_cut('concentric:1', 2, 2)).entropy <= 1e-2


# -- radial entropy --------------------------------------------------------

@pytest.mark.parametrize('k, m', [(3, 1), (3, 2), (3, 3), (2, 1), (4, 2)])
def test_layer_cut_entropy(k, m):
    assert layer_cut_entropy(k, m) == pytest.approx(math.log(math.comb(k + 1, m)), abs=1e-12)


def test_layer_cut_entropy_edges():
    assert layer_cut_entropy(3, 0) == 0.0
    assert layer_cut_entropy(3, 4) == 0.0
    with pytest.raises(ParameterError):
        layer_cut_entropy(3, 5)


def test_radial_entropy_adds_over_layers():
    value = radial_entropy(2, 3, [1, 2, 0], verify=True)
    assert value == pytest.approx(2 * LN3, abs=1e-12)
    assert radial_entropy(2, 3, [1, 1, 1]) == pytest.approx(3 * LN3)


def test_radial_entropy_k3():
    assert radial_entropy(3, 2, [1, 1], verify=True) == pytest.approx(2 * math.log(4), abs=1e-12)
    assert radial_entropy(3, 2, [2, 1], verify=True) == pytest.approx(math.log(6) + math.log(4), abs=1e-12)


def test_radial_entropy_checks_shape():
    with pytest.raises(ParameterError):
        radial_entropy(2, 2, [1])
    with pytest.raises(ParameterError):
        radial_entropy(2, 2, [1, 4])


# -- cuts ------------------------------------------------------------------

def test_parse_cuts():
    assert parse_cut('even-odd', 2, 3).sites == frozenset({2, 5, 8})
    assert parse_cut('concentric:1', 3, 2).sites == frozenset({1, 2, 3, 4})
    assert parse_cut('radial:1,2', 2, 2).sites == frozenset({1, 4, 5})
    cut = parse_cut('sites:3,1', 2, 2)
    assert cut.sites == frozenset({1, 3})
    assert cut.complement(6) == [2, 4, 5, 6]


@pytest.mark.parametrize('descriptor', [
    'middle', 'sites:', 'sites:0', 'sites:1,2,3,4,5,6', 'concentric:2', 'concentric:x',
    'radial:0,0', 'radial:1', 'even-odd:3',
])
def test_bad_cuts(descriptor):
    with pytest.raises(ParameterError):
        parse_cut(descriptor, 2, 2)


def test_schmidt_rejects_out_of_range_cut():
    with pytest.raises(ParameterError):
        schmidt(analytic_ground_state(2, 1), Cut(frozenset({4}), 'sites:4'))


# -- fidelity --------------------------------------------------------------

def test_fidelity_basics():
    a = analytic_ground_state(2, 1)
    assert fidelity(a, a) == pytest.approx(1.0)
    basis = enumerate_sector(2, 3, (1, 1, 1))
    symmetric = StateVector.normalized(basis, np.ones(basis.dim))
    assert fidelity(a, symmetric) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(BasisMismatchError):
        fidelity(a, analytic_ground_state(2, 1, full_basis=True))


def test_zero_vector_cannot_be_normalized():
    basis = enumerate_sector(2, 3, (1, 1, 1))
    with pytest.raises(ParameterError):
        StateVector.normalized(basis, np.zeros(basis.dim))


def test_exact_state_fidelity():
    ground = exact_ground_state(build_lattice(2, 2, 0.01))
    assert fidelity(ground.state, analytic_ground_state(2, 2)) == pytest.approx(0.901154, abs=1e-6)


def test_exact_state_is_close_to_analytic_at_weak_coupling():
    ground = exact_ground_state(build_lattice(2, 2, 1e-4))
    assert fidelity(ground.state, analytic_ground_state(2, 2)) >= 0.999


def test_infidelity_is_linear_in_alpha():
    slope, infidelities = fidelity_scaling(2, 2, [1e-2, 3e-3, 1e-3])
    assert infidelities[0] > infidelities[1] > infidelities[2] > 0
    assert abs(slope - 1.0) <= 0.3


# -- identities ------------------------------------------------------------

@pytest.mark.parametrize('k', [2, 3])
def test_singlet_identities(k):
    report = singlet_identities(k)
    assert report.passed
    assert set(report.residuals) == {'overcompleteness', 'triple_decomposition', 'reversal',
                                     'annihilation', 'face_action'}


def test_singlet_identities_range():
    with pytest.raises(ParameterError):
        singlet_identities(4)


# -- larger solves ---------------------------------------------------------

@pytest.mark.slow
def test_dense_and_iterative_solvers_agree():
    lattice = build_lattice(2, 3, 0.01)
    dense = exact_ground_state(lattice, solver='dense')
    lanczos = exact_ground_state(lattice, solver='iterative', seed=3)
    assert lanczos.energy == pytest.approx(dense.energy, abs=1e-9)
    assert fidelity(dense.state, lanczos.state) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
def test_tetrahedral_two_layer_solve():
    alpha = 0.01
    ground = exact_ground_state(build_lattice(3, 2, alpha))
    assert ground.state.basis.dim == 2520
    assert ground.energy == pytest.approx(-7.1945, abs=1e-3)
    # second order gives -6 - 24 alpha - 6 (4 alpha / 3)
    assert ground.energy < -6 - 32 * alpha
