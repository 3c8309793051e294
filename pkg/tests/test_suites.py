import pytest

from a2lab import suites as S


def test_suite_names():
    assert set(S.SUITES) == {"links", "symmetry", "diamonds", "measures", "martingale",
                             "rn", "detecting", "boundary", "tree"}


def test_unknown_suite(ball3):
    with pytest.raises(KeyError):
        S.run_suite("nope", ball3)


def test_links_suite(ball3):
    rep = S.run_links(ball3)
    assert rep.ok and rep.notes["links"] == 113


def test_boundary_suite(ball3):
    rep = S.run_boundary(ball3)
    assert rep.ok
    # off-wall shadows are never saturated; recorded, not asserted by the suite
    assert rep.notes["saturation_failures"] > 0


def test_spread_lines_are_distinct(ball3):
    lines = S.spread_lines(ball3, 2, 5, 0)
    assert len({tuple(sorted(line.items())) for line in lines}) == 5


def test_corrected_switch(ball3):
    assert not S.run_suite("martingale", ball3).ok
    assert S.run_suite("martingale", ball3, corrected=True).ok
