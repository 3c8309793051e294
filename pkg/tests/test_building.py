import json
from collections import Counter

import pytest

from a2lab.building import (
    BuildingBall,
    TrianglePresentation,
    build_ball,
    check_degrees,
    check_thickness,
    expected_sphere_size,
    extract_and_validate_link,
    fano_plane,
    load_presentation,
    opposition_in_link,
    search_triangle_presentation,
    sigma,
    validate_links,
)
from a2lab.errors import InputError


def test_fano_plane_axioms():
    p = fano_plane()
    assert p.is_valid()
    assert len(p.points) == 7 and len(p.lines) == 7
    assert all(len(line) == 3 for line in p.lines)
    assert len(p.incidence) == 21


def test_bundled_presentation_validates(tp):
    assert tp.is_valid()
    assert tp.q == 2
    # one relator per incident point-line pair
    assert len(tp.triples) == 21


def test_search_finds_a_presentation():
    found = search_triangle_presentation(fano_plane())
    assert found is not None and found.is_valid()


def test_dropping_a_relator_invalidates(tp):
    data = tp.to_dict()
    data["triples"] = data["triples"][1:]
    assert not TrianglePresentation.from_dict(data).is_valid()


def test_corrupt_presentation_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InputError):
        load_presentation(path)


def test_radius_zero_and_one(tp):
    assert build_ball(tp, 0).complex.n == 1
    b1 = build_ball(tp, 1)
    # centre plus its 2(q^2+q+1) = 14 neighbours
    assert b1.complex.n == 15
    # link of the centre: 21 incidences, plus 14 spokes
    assert len(b1.complex.edges) == 35


def test_negative_radius(tp):
    with pytest.raises(InputError):
        build_ball(tp, -1)


def test_sphere_sizes(ball3):
    # |V_(a,0)| = 7 * 4^(a-1), |V_(a,b)| = 7 * 6 * 4^(a+b-2) for a, b > 0
    assert ball3.sphere_sizes() == [1, 14, 28 + 28 + 42, 112 + 112 + 168 + 168]
    assert [expected_sphere_size(2, r) for r in range(4)] == [1, 14, 98, 560]


def test_sigma_distribution_at_distance_two(ball3):
    got = Counter(sigma(ball3, ball3.center, v) for v in range(ball3.complex.n) if ball3.depth(v) == 2)
    assert got == {(2, 0): 28, (0, 2): 28, (1, 1): 42}


def test_links_thickness_degrees(ball3):
    interior = len(ball3.interior(1))
    assert validate_links(ball3) == interior == 113
    assert check_thickness(ball3) > 0
    assert check_degrees(ball3) == interior


def test_centre_link_is_fano(ball3):
    link = extract_and_validate_link(ball3, ball3.center)
    assert link.plane.is_valid()
    assert len(link.point_ids) == len(link.line_ids) == 7


def test_opposition_in_fano_link():
    p = fano_plane()
    line = next(iter(p.lines))
    outside = next(x for x in p.points if x not in line)
    on = next(iter(line))
    assert not opposition_in_link(p, ("p", on), ("l", p.lines.index(line)))
    assert opposition_in_link(p, ("p", outside), ("l", p.lines.index(line)))


def test_build_is_deterministic(tp):
    a = json.dumps(build_ball(tp, 2).to_dict(), sort_keys=True)
    b = json.dumps(build_ball(tp, 2).to_dict(), sort_keys=True)
    assert a == b


def test_ball_round_trip(tp):
    ball = build_ball(tp, 2)
    back = BuildingBall.from_dict(json.loads(json.dumps(ball.to_dict())))
    assert back.complex.edges == ball.complex.edges
    assert back.radius == 2 and back.q == 2


def test_hash_mismatch_rejected(tp):
    data = build_ball(tp, 1).to_dict()
    data["metadata"]["presentation_sha256"] = "0" * 64
    with pytest.raises(InputError):
        BuildingBall.from_dict(data)
