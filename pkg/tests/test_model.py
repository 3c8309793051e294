import pytest

from a2lab.errors import InputError
from a2lab.model import (
    CrazyDiamond,
    DecoratedTree,
    Tree,
    apply_chain,
    classify_convex_subcomplex,
    convex_subcomplexes_exhaustive,
    coord_type,
    decompose_inclusion,
    dominant,
    enumerate_convex_subcomplexes,
    expected_extension_count,
    lattice_distance,
    lattice_hull,
    length,
    parallelogram_points,
    sector_points,
    star_tree,
    wall_tree_truncation,
    weyl_orbit,
)
from a2lab import suites as S


def test_types_and_lengths():
    assert coord_type((0, 0)) == 0
    assert coord_type((1, 0)) == 1
    assert coord_type((0, 1)) == 2
    assert length((2, 1)) == 3
    assert lattice_distance((1, -1)) == 1
    assert lattice_distance((2, -1)) == 2


def test_weyl_orbits():
    assert len(weyl_orbit((1, 0))) == 3
    assert len(weyl_orbit((1, 1))) == 6
    assert dominant((-1, 0)) == (0, 1)
    assert all(dominant(v) == (1, 1) for v in weyl_orbit((1, 1)))


@pytest.mark.parametrize("d", range(5))
def test_sector_point_count(d):
    assert len(sector_points(d)) == (d + 1) * (d + 2) // 2


@pytest.mark.parametrize("lam", [(0, 0), (1, 0), (1, 1), (2, 1), (3, 2)])
def test_parallelogram_point_count(lam):
    assert len(parallelogram_points(lam)) == (lam[0] + 1) * (lam[1] + 1)


def test_hull_of_diagonal():
    assert sorted(lattice_hull([(0, 0), (1, 1)])) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_decorated_tree_parity_rejected():
    with pytest.raises(InputError):
        DecoratedTree(Tree([0], []), 0, 0, 1, 0)


def test_decorated_tree_negative_column_rejected():
    with pytest.raises(InputError):
        DecoratedTree(Tree([0, 1, 2], [(0, 1), (1, 2)]), 0, 2, 0, 0)


@pytest.mark.parametrize("d, alcoves", [
    (S.POINT, 0), (S.VERT1, 0), (S.ALCOVE, 1), (S.RHOMBUS, 2),
    (S.STRIP3, 3), (S.BOOK3, 3), (S.STRIP4, 4), (S.TALL_BOOK2, 6),
])
def test_alcove_counts(d, alcoves):
    assert CrazyDiamond(d).alcoves() == alcoves


def test_catalog_respects_size_cap():
    cat = S.diamond_catalog()
    assert len(cat) >= 20
    assert all(CrazyDiamond(big).alcoves() <= 8 for _, _, big in cat)


@pytest.mark.parametrize("name, small, big", S.diamond_catalog(), ids=[c[0] for c in S.diamond_catalog()])
def test_realize_then_classify(name, small, big):
    for d in (small, big):
        cd = CrazyDiamond(d)
        back = classify_convex_subcomplex(cd.complex, range(cd.complex.n), d.tree)
        assert back.columns() == d.columns()


def test_convex_enumerators_agree():
    host = wall_tree_truncation(star_tree(3), 3, "c")
    assert host.n == 13
    assert enumerate_convex_subcomplexes(host, host.n) == convex_subcomplexes_exhaustive(host, host.n)


@pytest.mark.parametrize("small, big, expected", [
    (S.VERT1, S.ALCOVE, 3),       # B at a valency-0 vertex: q + 1
    (S.ALCOVE, S.BOOK2, 2),       # valency 1: q
    (S.BOOK2, S.BOOK3, 1),        # valency 2: q - 1
    (S.EDGE, S.ALCOVE, 3),        # C on a horizontal edge: q + 1
    (S.ALCOVE, S.RHOMBUS, 2),     # C: q
    (S.ALCOVE, S.RHOMBUS_LOW, 2), # F: q
    (S.VERT1, S.VERT2, 4),        # vertical growth: q^2
    (S.EDGE, S.SEG2, 4),          # horizontal growth: q^2
])
def test_single_step_counts(small, big, expected):
    steps = decompose_inclusion(small, big)
    assert len(steps) == 1
    assert expected_extension_count(steps[0], small, 2) == expected


@pytest.mark.parametrize("name, small, big", S.diamond_catalog(), ids=[c[0] for c in S.diamond_catalog()])
def test_decomposition_reaches_big(name, small, big):
    end = apply_chain(small, decompose_inclusion(small, big))[-1]
    assert end.columns() == big.columns()


def test_non_inclusion_rejected():
    with pytest.raises(InputError):
        decompose_inclusion(S.RHOMBUS, S.ALCOVE)
