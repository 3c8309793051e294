from fractions import Fraction

import pytest

from a2lab.building import sigma
from a2lab.complex import count_embeddings
from a2lab.errors import DepthInsufficientError, InputError, MeasureViolation
from a2lab.measures import (
    EmbeddingSet,
    GermSet,
    Report,
    conditional_expectation,
    cylinder_measure,
    extension_count_verify,
    germ_count,
    harmonic_measure,
    point_edge_classes,
    radon_nikodym_rows,
    random_rational_function,
    shadow_identities,
    tower_property,
    verify_disintegration,
    verify_duality,
    verify_restriction_pushforward,
)
from a2lab.model import lattice_complex, parallelogram_points, sector_truncation
from a2lab import suites as S


@pytest.fixture(scope="module")
def germs3(ball3):
    return GermSet(ball3.complex, ball3.center, 3, ball3)


@pytest.mark.parametrize("d, n", [(1, 21), (2, 168), (3, 1344)])
def test_germ_counts(ball3, d, n):
    assert germ_count(2, d) == n
    assert len(GermSet(ball3.complex, ball3.center, d, ball3)) == n


@pytest.mark.parametrize("d", [1, 2])
def test_germs_are_half_the_typed_sector_embeddings(ball3, d):
    # orientation picks one of the two type orders of (1,0) and (0,1)
    sec = sector_truncation(d)
    total = count_embeddings(sec, ball3.complex, pinned={sec.vertex((0, 0)): ball3.center}, typed=True)
    assert total == 2 * len(GermSet(ball3.complex, ball3.center, d, ball3))


def test_neighbour_shadows(ball3):
    for z in ball3.complex.neighbors[ball3.center]:
        assert harmonic_measure(ball3, ball3.center, int(z)) == Fraction(1, 7)


@pytest.mark.parametrize("lam", [(1, 1), (2, 0), (0, 2)])
def test_shadows_partition_the_boundary(ball3, lam):
    o = ball3.center
    zs = [v for v in range(ball3.complex.n) if ball3.depth(v) == sum(lam) and sigma(ball3, o, v) == lam]
    masses = [harmonic_measure(ball3, o, z) for z in zs]
    assert sum(masses) == 1
    assert len(set(masses)) == 1


def test_harmonic_depth_too_small(ball3):
    z = next(v for v in range(ball3.complex.n) if ball3.depth(v) == 2)
    with pytest.raises(DepthInsufficientError):
        harmonic_measure(ball3, ball3.center, z, depth=1)


def test_embedding_set_pushforward(ball3):
    dom = lattice_complex(parallelogram_points((1, 1)))
    es = EmbeddingSet(dom, ball3.complex, {(0, 0): ball3.center})
    push = es.pushforward([(1, 0)])
    assert sum(push.values()) == 1
    for (v,), mass in push.items():
        assert cylinder_measure(es, {(1, 0): v}) == mass


def test_empty_embedding_set_has_no_uniform_measure(ball3):
    # a vertex at σ = (2, 0) is not the far corner of any (1, 1) parallelogram
    dom = lattice_complex(parallelogram_points((1, 1)))
    o = ball3.center
    far = next(v for v in range(ball3.complex.n) if ball3.depth(v) == 2 and sigma(ball3, o, v) == (2, 0))
    es = EmbeddingSet(dom, ball3.complex, {(0, 0): o, (1, 1): far})
    assert es.cardinality == 0
    with pytest.raises(MeasureViolation):
        es.uniform()


def test_non_isometric_pins_rejected(ball3):
    dom = lattice_complex(parallelogram_points((1, 0)))
    far = next(v for v in range(ball3.complex.n) if ball3.depth(v) == 2)
    with pytest.raises(InputError):
        EmbeddingSet(dom, ball3.complex, {(0, 0): ball3.center, (1, 0): far})


@pytest.mark.parametrize("name", ["parallelograms", "sectors", "diamonds"])
def test_measure_identities(ball3, name):
    chain = S.standard_chains()[name]
    pins = {chain[0].labels[0]: ball3.center}
    for rep in (verify_restriction_pushforward(chain, ball3.complex, pins),
                verify_disintegration(chain, ball3.complex, pins),
                verify_duality(chain, ball3.complex, pins, seed=3)):
        assert rep.ok, rep.to_dict()


def test_chain_must_nest(ball3):
    a = lattice_complex([(0, 0), (1, 0)])
    b = lattice_complex([(0, 0), (0, 1)])
    with pytest.raises(InputError):
        verify_restriction_pushforward([a, b], ball3.complex, {(0, 0): ball3.center})


def test_point_edge_by_type_offset(ball3):
    assert point_edge_classes(ball3, S.POINT, S.VERT1).by_class == {1: 7, 2: 7}


def test_extension_count_constant(ball3):
    ri = extension_count_verify(S.ALCOVE, S.RHOMBUS, ball3)
    assert ri.value == 2 and ri.base_embeddings > 0


def test_shadow_ratio_one_quarter(germs3):
    for n in (1, 2):
        out = shadow_identities(germs3, 0, 0, n)
        assert out["mu_omega_next"] / out["mu_omega"] == Fraction(1, 4)


def test_e_inclusion_holds_but_equality_breaks_off_the_wall(germs3):
    for row in range(0, len(germs3), 97):
        assert shadow_identities(germs3, row, 0, 1)["identity"]
        out = shadow_identities(germs3, row, 1, 0)
        assert out["inclusion"] and not out["identity"]


def test_shadow_depth_check(germs3):
    with pytest.raises(DepthInsufficientError):
        shadow_identities(germs3, 0, 2, 1)


def test_conditional_expectation_is_class_constant(germs3):
    f = random_rational_function(len(germs3), 1)
    e = conditional_expectation(germs3, f, (1, 0))
    keys = germs3.at((1, 0))
    by_key = {}
    for k, v in zip(keys, e):
        assert by_key.setdefault(int(k), v) == v
    assert sum(e) == sum(f)


@pytest.mark.parametrize("j, k", [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)])
def test_tower_property(germs3, j, k):
    assert tower_property(germs3, random_rational_function(len(germs3), 7), j, k)


def test_radon_nikodym_one_pair(ball3, germs3):
    x = ball3.center
    y = int(ball3.complex.neighbors[x][0])
    rows = [r for r in radon_nikodym_rows(ball3, x, y, germs3) if r.h is not None]
    assert rows
    assert {r.lhs for r in rows} <= {Fraction(1, 4), Fraction(1), Fraction(4)}
    assert all(r.lhs == r.rhs(2, -1) for r in rows)
    assert sum(r.mu_x for r in rows) == 1 and sum(r.mu_y for r in rows) == 1


def test_radon_nikodym_needs_adjacent_pair(ball3):
    far = next(v for v in range(ball3.complex.n) if ball3.depth(v) == 2)
    with pytest.raises(InputError):
        radon_nikodym_rows(ball3, ball3.center, far)


def test_report_bookkeeping():
    rep = Report("x")
    rep.check(True)
    rep.check(False, {"k": 1})
    assert (rep.instances, rep.passed, rep.failed) == (2, 1, 1)
    assert not rep.ok and rep.witnesses == [{"k": 1}]
    assert not Report("empty").ok
