import pytest

from a2lab.building import build_ball, bundled_presentation


@pytest.fixture(scope="session")
def tp():
    return bundled_presentation()


@pytest.fixture(scope="session")
def ball3(tp):
    return build_ball(tp, 3)


@pytest.fixture(scope="session")
def ball4(tp):
    return build_ball(tp, 4)


_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance(request):
    """Collects one verdict line per acceptance criterion."""
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines, key=lambda k: (int(k.rstrip("*")), k)):
        terminalreporter.write_line(lines[key])
