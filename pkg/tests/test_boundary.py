from itertools import permutations

import pytest

from a2lab.boundary import (
    detecting_pushforward_check,
    find_generic_basepoint,
    genericity_test,
    germs_along_line,
    lines_through,
    ordered_triple_orbit,
    panel_tree_truncation,
    perspectivity_map,
    plane_perspectivity,
    plane_projectivity_group,
    regular_tree_ball,
    reverse_line,
    saturation_witness,
    sectorpi0_sweep,
    shadow_factorization_check,
    tree_detecting_check,
)
from a2lab.building import fano_plane, sigma
from a2lab.errors import DepthInsufficientError
from a2lab.measures import GermSet


@pytest.fixture(scope="module")
def line2(ball3):
    return lines_through(ball3, ball3.center, 2)[0]


# -- projective plane -------------------------------------------------------------


def test_plane_perspectivity_is_bijection():
    p = fano_plane()
    a, b = 0, 1
    centre = next(x for x in p.points if x not in p.lines[a] and x not in p.lines[b])
    m = plane_perspectivity(p, a, centre, b)
    assert set(m) == set(p.lines[a])
    assert set(m.values()) == set(p.lines[b])


@pytest.mark.parametrize("line", range(7))
def test_projectivity_group_of_fano_line(line):
    p = fano_plane()
    grp = plane_projectivity_group(p, line)
    pts = tuple(sorted(p.lines[line]))
    assert len(grp) == 6
    assert ordered_triple_orbit(grp, pts) == set(permutations(pts))


# -- singular lines and panel trees ----------------------------------------------------


def test_line_counts(ball3):
    # 7 first steps, then 4 straight continuations each way at every further step
    assert len(lines_through(ball3, ball3.center, 1)) == 7 * 4
    assert len(lines_through(ball3, ball3.center, 2)) == 7 * 4 ** 3
    assert len(lines_through(ball3, ball3.center, 3)) == 7 * 4 ** 5


def test_lines_are_straight(ball3, line2):
    c = ball3.complex
    idx = sorted(line2)
    assert idx == [-2, -1, 0, 1, 2]
    for i, j in zip(idx, idx[1:]):
        assert (c.types[line2[j]] - c.types[line2[i]]) % 3 == 1
    assert c.distance(line2[-2], line2[2]) == 4


def test_panel_tree_regular(ball4):
    line = lines_through(ball4, ball4.center, 2)[0]
    ray = [line[i] for i in range(0, 3)]
    tree = panel_tree_truncation(ball4, ray, 2)
    assert len(tree.level(1)) == 3 and len(tree.level(2)) == 6


def test_perspectivity_on_radius_four(ball4):
    line = lines_through(ball4, ball4.center, 2)[0]
    fwd = perspectivity_map(ball4, line, 2)
    back = perspectivity_map(ball4, reverse_line(line), 2)
    assert fwd.is_bijective() and fwd.preserves_distance()
    assert len(fwd.mapping) == 10
    assert all(back.mapping[fwd.mapping[a]] == a for a in fwd.mapping)


# -- genericity and the detecting flow ------------------------------------------------------


def test_basepoint_search_matches_oracle(ball3, line2):
    c = ball3.complex
    gs = GermSet(c, ball3.center, 3, ball3)
    decided = 0
    for k in range(0, len(gs), 11):
        g = {p: int(gs.members[k, gs.col[p]]) for p in gs.points}
        try:
            i0 = find_generic_basepoint(ball3, g, 3, line2)
        except DepthInsufficientError:
            continue
        assert i0 == find_generic_basepoint(ball3, g, 3, line2, oracle=True)
        at, _ = germs_along_line(c, g, 3, line2)[i0]
        assert genericity_test(c, (at[(1, 0)], at[(0, 1)]), line2[i0 - 1], line2[i0 + 1])
        decided += 1
    assert decided > 0


def test_genericity_matches_extension_existence(ball3, line2):
    rep = sectorpi0_sweep(ball3, line2)
    assert rep.ok and rep.instances == 168


def test_detecting_pi0_constant_density(ball3, line2):
    rep = detecting_pushforward_check(ball3, line2, 0, 2)
    assert rep.ok
    assert rep.notes["pushed_support"] == 48


def test_detecting_pi1_lands_on_generic_germs(ball3, line2):
    rep = detecting_pushforward_check(ball3, line2, 1, 2, target="generic")
    assert rep.ok
    assert rep.notes["pushed_support"] == rep.notes["target_support"] == 12


def test_detecting_pi1_misses_part_of_e1(ball3, line2):
    # E_1 has 18 depth-2 germs; the q/(q+1) generic part carries the pushforward
    rep = detecting_pushforward_check(ball3, line2, 1, 2, target="E_n")
    assert not rep.ok
    assert rep.notes["e_n_support"] == 18
    assert rep.notes["pushed_support"] * 3 == rep.notes["e_n_support"] * 2


# -- tree warm-up -------------------------------------------------------------------


def test_regular_tree_spheres():
    t = regular_tree_ball(3, 3)
    d = t.distances[0]
    assert [int((d == r).sum()) for r in range(4)] == [1, 3, 6, 12]
    assert len(t.edges) == t.n - 1


@pytest.mark.parametrize("n", [1, 2])
def test_tree_detecting(n):
    assert tree_detecting_check(3, 2, 4, n).ok


# -- shadows ------------------------------------------------------------------------


def _vertex_with_sigma(ball, lam):
    o = ball.center
    return next(v for v in range(ball.complex.n) if ball.depth(v) == sum(lam) and sigma(ball, o, v) == lam)


@pytest.mark.parametrize("lam", [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
def test_shadow_factorisation(ball3, lam):
    z = _vertex_with_sigma(ball3, lam)
    rep = shadow_factorization_check(ball3, ball3.center, z, saturation=False)
    assert rep.ok


@pytest.mark.parametrize("lam, saturated", [((2, 0), True), ((0, 1), False), ((1, 1), False)])
def test_saturation_only_on_the_plus_wall(ball3, lam, saturated):
    z = _vertex_with_sigma(ball3, lam)
    rep = shadow_factorization_check(ball3, ball3.center, z)
    assert rep.notes["saturation"] is saturated
    assert (saturation_witness(ball3, ball3.center, z) is None) is saturated
