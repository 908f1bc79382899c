import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from analysis.simplex_spectrum import (
    YoungDiagram,
    composition_count,
    hook_content_dim,
    hook_length_count,
    kostka,
    offdiag_spectrum,
    partitions,
    perm_degeneracy,
    perm_eigenvalue,
    perm_spectrum,
    standard_tableaux,
    verify_against_ed,
    young_operator_state,
)
from core.errors import ParameterError
from core.hilbert import FullBasis, multinomial, permutation_hamiltonian, simplex_hamiltonian


@pytest.mark.parametrize('shape, value', [
    ((3,), 3.0),
    ((2, 1), 0.0),
    ((1, 1, 1), -3.0),
    ((1, 1, 1, 1), -6.0),
    ((4,), 6.0),
    ((2, 2), 0.0),
])
def test_perm_eigenvalue(shape, value):
    assert perm_eigenvalue(shape) == value


@pytest.mark.parametrize('shape, k, degeneracy', [
    ((2, 1), 2, 16),
    ((3,), 2, 10),
    ((1, 1, 1), 2, 1),
    ((3, 1), 3, 135),
    ((2, 2), 3, 40),
    ((1, 1, 1, 1), 3, 1),
])
def test_perm_degeneracy(shape, k, degeneracy):
    assert perm_degeneracy(shape, k) == degeneracy


def test_degeneracy_needs_matching_size():
    with pytest.raises(ParameterError):
        perm_degeneracy((2, 1), 3)


@pytest.mark.parametrize('rows', [(), (1, 2), (2, 0), (-1,)])
def test_invalid_diagram(rows):
    with pytest.raises(ParameterError):
        YoungDiagram(rows)


def test_diagram_columns_and_label():
    diagram = YoungDiagram((3, 1))
    assert diagram.columns == (2, 1, 1)
    assert str(diagram) == '(3,1)'
    assert diagram.size == 4


@pytest.mark.parametrize('k, total', [(1, 4), (2, 27), (3, 256), (4, 3125)])
def test_spectra_fill_the_simplex_space(k, total):
    assert perm_spectrum(k).total_degeneracy == total
    assert offdiag_spectrum(k).total_degeneracy == total


def test_k2_permutation_table():
    assert perm_spectrum(2).multiplicities() == {-3.0: 1, 0.0: 16, 3.0: 10}


def test_k3_permutation_table():
    spectrum = perm_spectrum(3)
    assert spectrum.multiplicities() == {-6.0: 1, -2.0: 45, 0.0: 40, 2.0: 135, 6.0: 35}
    assert len(spectrum.entries) == 5


@pytest.mark.parametrize('k, ground', [(1, -1.0), (2, -3.0), (3, -6.0)])
def test_offdiag_ground_is_the_singlet(k, ground):
    spectrum = offdiag_spectrum(k)
    entry = spectrum.ground()
    assert entry.eigenvalue == ground
    assert entry.degeneracy == 1
    assert entry.diagram.rows == (1,) * (k + 1)
    assert spectrum.multiplicities()[ground] == 1


@pytest.mark.parametrize('k', [1, 2, 3, 4, 5])
def test_offdiag_trace_vanishes(k):
    assert offdiag_spectrum(k).trace == 0.0


def test_offdiag_k1_matches_bond():
    assert offdiag_spectrum(1).multiplicities() == {-1.0: 1, 0.0: 2, 1.0: 1}


def test_offdiag_k_bounds():
    with pytest.raises(ParameterError):
        offdiag_spectrum(7)
    with pytest.raises(ParameterError):
        perm_spectrum(0)


# -- combinatorics ---------------------------------------------------------

@pytest.mark.parametrize('n', range(1, 8))
def test_hook_length_counts_standard_tableaux(n):
    for rows in partitions(n):
        assert hook_length_count(rows) == len(standard_tableaux(rows))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9))
def test_sum_of_squared_dimensions_is_factorial(n):
    assert sum(hook_length_count(rows) ** 2 for rows in partitions(n)) == math.factorial(n)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 6), d=st.integers(1, 5))
def test_schur_weyl_dimension_count(n, d):
    assert sum(hook_length_count(r) * hook_content_dim(r, d) for r in partitions(n)) == d ** n


@pytest.mark.parametrize('shape, content, value', [
    ((2, 1), (1, 1, 1), 2),
    ((3,), (2, 1), 1),
    ((2, 2), (2, 1, 1), 1),
    ((2, 1, 1), (1, 1, 1, 1), 3),
    ((1, 1, 1), (2, 1), 0),
    ((2, 1), (1, 1), 0),
])
def test_kostka(shape, content, value):
    assert kostka(shape, content) == value


@pytest.mark.parametrize('n', [3, 4, 5])
def test_kostka_multinomial_sum_rule(n):
    for mu in partitions(n):
        words = sum(hook_length_count(lam) * kostka(lam, mu) for lam in partitions(n))
        assert words == multinomial(mu)


def test_composition_count():
    assert composition_count((1, 1, 1), 3) == 1
    assert composition_count((1, 1, 1, 1), 4) == 1
    assert composition_count((2, 1), 3) == 6
    assert composition_count((3,), 3) == 3
    assert composition_count((2, 2), 4) == 6


# -- exact diagonalization cross-check -------------------------------------

@pytest.mark.parametrize('k', [1, 2, 3])
def test_verify_against_ed(k):
    report = verify_against_ed(k)
    assert report.passed
    assert report.permutation == perm_spectrum(k).multiplicities()
    assert report.off_diagonal == offdiag_spectrum(k).multiplicities()
    assert report.sectors_checked == math.comb(2 * k + 1, k)
    assert report.max_residual < 1e-10


def test_verify_bounds():
    with pytest.raises(ParameterError):
        verify_against_ed(5)


@pytest.mark.parametrize('tableau, colors', [
    (((1, 2), (3,)), (0, 0, 1)),
    (((1, 3), (2,)), (0, 1, 2)),
    (((1,), (2,), (3,)), (0, 1, 2)),
    (((1, 2, 3),), (0, 1, 1)),
])
def test_young_operator_states_are_eigenvectors(tableau, colors):
    vector = young_operator_state(tableau, colors, 2)
    assert np.linalg.norm(vector) == pytest.approx(1.0)
    shape = tuple(len(r) for r in tableau)
    H = permutation_hamiltonian(2, FullBasis(2, 3))
    assert np.max(np.abs(H.matvec(vector) - perm_eigenvalue(shape) * vector)) < 1e-13


def test_young_operator_vanishes_on_repeated_column_colors():
    vector = young_operator_state(((1,), (2,), (3,)), (0, 0, 1), 2)
    assert not np.any(vector)


def test_young_operator_input_checks():
    with pytest.raises(ParameterError):
        young_operator_state(((1, 2), (4,)), (0, 0, 1), 2)
    with pytest.raises(ParameterError):
        young_operator_state(((1, 2), (3,)), (0, 0, 3), 2)


def test_spectrum_frame():
    frame = perm_spectrum(2).to_frame()
    assert list(frame.columns) == ['diagram', 'content', 'eigenvalue', 'degeneracy']
    assert frame['eigenvalue'].tolist() == [-3.0, 0.0, 3.0]
    assert frame['diagram'].tolist() == ['(1,1,1)', '(2,1)', '(3)']
    assert frame['degeneracy'].sum() == 27

    offdiag = offdiag_spectrum(2).to_frame()
    assert offdiag['eigenvalue'].is_monotonic_increasing
    assert offdiag.loc[0, 'content'] == '(1,1,1)'


@pytest.mark.parametrize('k, shape, mu, energy', [
    (2, (2, 1), (2, 1, 0), -1.0),
    (3, (2, 1, 1), (2, 1, 1, 0), -3.0),
])
def test_repeated_color_lowers_offdiag_energy(k, shape, mu, energy):
    entries = [e for e in offdiag_spectrum(k).entries
               if e.diagram.rows == shape and e.content == mu]
    assert len(entries) == 1
    assert entries[0].eigenvalue == energy


def test_young_states_under_offdiag_hamiltonian():
    vector = young_operator_state(((1, 2), (3,)), (0, 0, 1), 2)
    H = simplex_hamiltonian(FullBasis(2, 3), [1, 2, 3])
    assert np.max(np.abs(H.matvec(vector) + vector)) < 1e-13
