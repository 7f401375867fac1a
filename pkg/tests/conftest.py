import pytest

from torusdim.catalog import catalog_spec
from torusdim.classes import loop_classes
from torusdim.netgen import closure

_cache = {}


def diagram_of(name, mode="torus"):
    key = (name, mode)
    if key not in _cache:
        spec = catalog_spec(name, mode)
        d = closure(spec)
        _cache[key] = (spec, d, loop_classes(d))
    return _cache[key]


@pytest.fixture(scope="session")
def golden_torus():
    return diagram_of("golden", "torus")


@pytest.fixture(scope="session")
def golden_line():
    return diagram_of("golden", "line")


@pytest.fixture(scope="session")
def isolated_torus():
    return diagram_of("isolated", "torus")


@pytest.fixture(scope="session")
def essnotunique_torus():
    return diagram_of("essnotunique", "torus")


ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LOG, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
