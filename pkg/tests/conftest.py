import itertools
import logging

import pytest
import structlog
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from majority.graph import Graph, build_graph

settings.register_profile(
    "majority",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("majority")

structlog.configure(
    processors=[structlog.processors.KeyValueRenderer()],
    wrapper_class=structlog.make_filtering_bound_logger(logging.WARNING),
    logger_factory=structlog.PrintLoggerFactory(),
)


def cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return build_graph(n, itertools.combinations(range(n), 2))


def complete_bipartite(a: int, b: int) -> Graph:
    return build_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def hypercube(dimension: int) -> Graph:
    n = 2**dimension
    return build_graph(
        n, [(v, v ^ (1 << bit)) for v in range(n) for bit in range(dimension) if v < v ^ (1 << bit)]
    )


@st.composite
def graphs(draw, max_vertices=9):
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


@pytest.fixture
def c4() -> Graph:
    return cycle(4)


@pytest.fixture
def triangle() -> Graph:
    return cycle(3)


@pytest.fixture
def k66() -> Graph:
    return complete_bipartite(6, 6)


@pytest.fixture
def k9() -> Graph:
    return complete(9)


@pytest.fixture
def q4() -> Graph:
    return hypercube(4)
