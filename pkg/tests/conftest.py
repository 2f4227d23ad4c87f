import numpy as np
import pytest

from lorentzdod.chart import Frame
from lorentzdod.geometry import make_space
from lorentzdod.groups import desk_instance
from lorentzdod.limitset import limit_sample


@pytest.fixture(params=[3, 4, 5])
def frame_n(request):
    return Frame.standard(make_space(request.param))


@pytest.fixture(scope="session")
def space3():
    return make_space(3)


@pytest.fixture(scope="session")
def frame3(space3):
    return Frame.standard(space3)


@pytest.fixture(scope="session")
def desk():
    return desk_instance()


@pytest.fixture(scope="session")
def desk_linear():
    return desk_instance(seed=None)


@pytest.fixture(scope="session")
def desk_sample(frame3, desk):
    return limit_sample(frame3, desk, 6)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_null_vprime(rng, n, future=True):
    """Null vector of q' = diag(1,..,1,-1) with Euclidean-unit spatial part."""
    x = rng.standard_normal(n - 1)
    x /= np.linalg.norm(x)
    return np.append(x, 1.0 if future else -1.0)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(label, passed, detail)``."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(label, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip()
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
