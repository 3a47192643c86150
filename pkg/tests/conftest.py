import functools

import pytest

from wordmetric.lattice import GeneratorSet, build_hull
from wordmetric.metric import bfs_ball
from wordmetric.presets import preset


@functools.lru_cache(maxsize=None)
def _table(name, radius):
    return bfs_ball(preset(name), radius)


@pytest.fixture(scope="session")
def table():
    """``table(name, radius)`` -> cached BFS table for a preset."""
    return _table


@pytest.fixture(scope="session")
def shape():
    return lambda name: build_hull(preset(name))


@pytest.fixture
def knight():
    return preset("chess-knight")


@pytest.fixture
def std2():
    return preset("std-d2")


@pytest.fixture
def six_one():
    return preset("six-one-d2")


@pytest.fixture
def octahedron():
    return preset("std-d3")


@pytest.fixture
def line13():
    return GeneratorSet.from_vectors([(1,), (3,)], symmetrize=True)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
