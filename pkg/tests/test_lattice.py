import math

import numpy as np
import pytest

from core.errors import ParameterError
from core.lattice import build_lattice, embed_lattice, lattice_from_dict


def pairs(bonds):
    return {(b.i, b.j) for b in bonds}


def test_single_layer_is_bare_simplex():
    lattice = build_lattice(2, 1, 0.1)
    assert lattice.n_sites == 3
    assert len(lattice.bonds) == 3
    assert all(b.coupling == 1.0 for b in lattice.bonds)
    assert lattice.warnings == ()


def test_two_layer_k2_bonds():
    lattice = build_lattice(2, 2, 0.04)
    assert lattice.n_sites == 6
    assert len(lattice.intra_layer_bonds()) == 3
    inter = lattice.inter_layer_bonds(1)
    assert pairs(inter) == {(3, 4), (2, 4), (1, 5), (3, 5), (2, 6), (1, 6)}
    for b in inter:
        assert b.coupling == pytest.approx(math.sqrt(6) * 0.2, rel=1e-14)


def test_two_layer_k3_bonds():
    lattice = build_lattice(3, 2, 0.01)
    assert lattice.n_sites == 8
    assert len(lattice.intra_layer_bonds()) == 6
    inter = lattice.inter_layer_bonds(1)
    assert len(inter) == 12
    for b in inter:
        assert b.coupling == pytest.approx(math.sqrt(24) * 0.1, rel=1e-14)


def test_bonds_sorted_and_sites_ascending():
    lattice = build_lattice(3, 3, 0.02)
    keys = [(b.i, b.j) for b in lattice.bonds]
    assert keys == sorted(keys)
    assert all(b.i < b.j for b in lattice.bonds)
    assert [s.id for s in lattice.sites] == list(range(1, 13))


@pytest.mark.parametrize('k', [1, 2, 3, 4])
@pytest.mark.parametrize('layers', [1, 2, 3, 4])
def test_counts_and_adjacency_rule(k, layers):
    lattice = build_lattice(k, layers, 0.01)
    assert lattice.n_sites == (k + 1) * layers
    assert len(lattice.bonds) == math.comb(k + 1, 2) + (layers - 1) * (k + 1) * k

    bonded = pairs(lattice.bonds)
    for n in range(1, layers):
        for a in range(1, k + 2):
            outer = lattice.site_id(n + 1, a)
            partners = [b for b in range(1, k + 2)
                        if (min(outer, lattice.site_id(n, b)), max(outer, lattice.site_id(n, b))) in bonded]
            assert len(partners) == k
            assert a not in partners


def test_couplings_form_geometric_sequence():
    k, alpha = 3, 0.05
    lattice = build_lattice(k, 4, alpha)
    for n in range(1, 4):
        expected = math.sqrt(24) * alpha ** (n - 0.5)
        couplings = {b.coupling for b in lattice.inter_layer_bonds(n)}
        assert len(couplings) == 1
        assert abs(couplings.pop() - expected) / expected < 1e-14
        assert lattice.inter_layer_coupling(n) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize('k, layers, alpha', [
    (0, 2, 0.1),
    (2, 0, 0.1),
    (2, 2, 0.0),
    (2, 2, 1.0),
    (2, 2, -0.3),
])
def test_parameter_domain(k, layers, alpha):
    with pytest.raises(ParameterError):
        build_lattice(k, layers, alpha)


def test_parameter_error_is_value_error():
    with pytest.raises(ValueError):
        build_lattice(2, 2, 2.0)


def test_flat_point_warning():
    assert build_lattice(2, 2, 0.01).warnings == ()
    lattice = build_lattice(2, 2, 0.2)
    assert lattice.flat_point == pytest.approx(1 / 6)
    assert len(lattice.warnings) == 1
    assert 'flat point' in lattice.warnings[0]


def test_without_inter_layer_bonds():
    lattice = build_lattice(2, 3, 0.01).without_inter_layer_bonds()
    assert pairs(lattice.bonds) == {(1, 2), (1, 3), (2, 3)}
    assert lattice.n_sites == 9


def test_dict_export_and_import():
    lattice = build_lattice(2, 2, 0.04)
    data = lattice.to_dict(embed_lattice(lattice))
    assert set(data) == {'k', 'layers', 'alpha', 'sites', 'bonds', 'embedding'}
    assert data['sites'][4] == {'id': 5, 'layer': 2, 'local': 2}
    assert len(data['embedding']) == 6
    assert lattice_from_dict(data) == lattice


def test_dict_import_rejects_foreign_bonds():
    data = build_lattice(2, 2, 0.04).to_dict()
    data['bonds'][0] = {'i': 1, 'j': 4, 'coupling': 1.0}
    with pytest.raises(ParameterError):
        lattice_from_dict(data)


def _layer(coords, lattice, n):
    return np.array([coords.position(s) for s in lattice.layer_sites(n)])


def test_embedding_single_triangle():
    lattice = build_lattice(2, 1, 0.1)
    pts = _layer(embed_lattice(lattice), lattice, 1)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
    assert np.allclose(pts.sum(axis=0), 0.0, atol=1e-14)
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.dot(pts[i], pts[j]) == pytest.approx(-0.5, abs=1e-14)


def test_embedding_radius_doubles_for_triangles():
    lattice = build_lattice(2, 2, 0.04)
    emb = embed_lattice(lattice)
    r1 = np.linalg.norm(_layer(emb, lattice, 1), axis=1)
    r2 = np.linalg.norm(_layer(emb, lattice, 2), axis=1)
    assert np.allclose(r2 / r1, 2.0, atol=1e-13)


def test_embedding_edge_triples_for_tetrahedra():
    lattice = build_lattice(3, 2, 0.01)
    emb = embed_lattice(lattice)
    l1, l2 = _layer(emb, lattice, 1), _layer(emb, lattice, 2)
    assert np.linalg.norm(l2[0] - l2[1]) / np.linalg.norm(l1[0] - l1[1]) == pytest.approx(3.0, rel=1e-13)


@pytest.mark.parametrize('k', [1, 2, 3, 4])
def test_vertices_sit_on_facet_centroids(k):
    lattice = build_lattice(k, 3, 0.01)
    emb = embed_lattice(lattice)
    for n in range(1, 3):
        inner, outer = _layer(emb, lattice, n), _layer(emb, lattice, n + 1)
        for b in range(k + 1):
            facet = np.delete(outer, b, axis=0)
            assert np.linalg.norm(inner[b] - facet.mean(axis=0)) < 1e-12
