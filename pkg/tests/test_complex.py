import pytest

from a2lab.complex import (
    SimplicialMap,
    TypedComplex,
    check_isometric_embedding,
    convex_hull,
    count_embeddings,
    geodesic_interval,
    is_convex_subcomplex,
)
from a2lab.errors import InputError
from a2lab.model import apartment_ball, lattice_complex


@pytest.fixture
def hexagon():
    return apartment_ball(1)


def test_flag_completion_fills_triangles():
    c = TypedComplex([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
    assert c.triangles == frozenset({(0, 1, 2)})


def test_loop_rejected():
    with pytest.raises(InputError):
        TypedComplex([0, 1], [(0, 0)])


def test_edge_outside_vertex_range_rejected():
    with pytest.raises(InputError):
        TypedComplex([0, 1], [(0, 5)])


def test_serialisation_round_trip(hexagon):
    back = TypedComplex.from_dict(hexagon.to_dict())
    assert back.types == hexagon.types
    assert back.edges == hexagon.edges
    assert back.triangles == hexagon.triangles


def test_hexagon_automorphisms(hexagon):
    # dihedral group of the hexagon fixes the centre; order 12
    assert hexagon.n == 7 and len(hexagon.triangles) == 6
    assert count_embeddings(hexagon, hexagon) == 12
    assert count_embeddings(hexagon, hexagon, typed=True) == 12


def test_triangle_self_maps():
    t = lattice_complex([(0, 0), (1, 0), (0, 1)])
    assert count_embeddings(t, t) == 6


def test_pinned_embedding_count(hexagon):
    edge = lattice_complex([(0, 0), (1, 0)])
    centre = hexagon.vertex((0, 0))
    # the centre has six neighbours
    assert count_embeddings(edge, hexagon, pinned={edge.vertex((0, 0)): centre}) == 6


def test_opposite_ring_vertices_hull(hexagon):
    a, b = hexagon.vertex((1, 0)), hexagon.vertex((-1, 0))
    assert hexagon.distance(a, b) == 2
    hull = convex_hull(hexagon, [a, b])
    assert {hexagon.labels[v] for v in hull} == {(1, 0), (0, 0), (-1, 0)}
    assert set(geodesic_interval(hexagon, a, b).tolist()) == set(hull)


def test_adjacent_pair_is_convex(hexagon):
    assert is_convex_subcomplex(hexagon, [hexagon.vertex((1, 0)), hexagon.vertex((0, 1))])
    assert not is_convex_subcomplex(hexagon, [hexagon.vertex((1, 0)), hexagon.vertex((-1, 0))])


def test_isometric_embedding_check(hexagon):
    path = lattice_complex([(0, 0), (1, 0)])
    good = SimplicialMap(path, hexagon, [hexagon.vertex((0, 0)), hexagon.vertex((1, 0))])
    assert check_isometric_embedding(good)
