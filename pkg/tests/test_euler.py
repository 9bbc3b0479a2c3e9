import pytest
from hypothesis import given

from conftest import cycle, graphs
from majority.errors import SelectorExhaustedError
from majority.euler import Side, balanced_bicolouring, degree_selector, no_vertex
from majority.graph import build_graph


def test_four_cycle_alternates(c4):
    split = balanced_bicolouring(c4)
    assert split.counts(c4) == [(1, 1)] * 4
    assert split.bad_vertices == {}


def test_triangle_has_bad_vertex(triangle):
    split = balanced_bicolouring(triangle)
    (bad,) = split.bad_vertices.values()
    counts = split.counts(triangle)
    assert counts[bad] == (0, 2)
    assert all(counts[v] == (1, 1) for v in range(3) if v != bad)
    assert split.violations(triangle) == []


def test_path_alternates():
    path = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    split = balanced_bicolouring(path)
    assert split.side[0] != split.side[1] != split.side[2]
    assert split.violations(path) == []


def test_selector_picks_allowed_vertex():
    # triangle 0-1-2 where only vertex 2 may carry the surplus
    triangle = cycle(3)
    split = balanced_bicolouring(triangle, degree_selector((0, 0, 2), {2}))
    assert split.bad_vertices == {0: 2}
    assert split.counts(triangle)[2] == (0, 2)


def test_selector_exhausted(triangle):
    with pytest.raises(SelectorExhaustedError):
        balanced_bicolouring(triangle, no_vertex)


def test_components_are_independent():
    # a triangle next to a four-cycle: only the triangle needs a bad vertex
    graph = build_graph(7, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 3)])
    split = balanced_bicolouring(graph)
    assert list(split.bad_vertices) == [0]
    assert split.violations(graph) == []


def test_with_side(c4):
    split = balanced_bicolouring(c4)
    flipped = split.with_side(0, Side(1 - split.side[0]))
    assert flipped.side[0] != split.side[0]
    assert flipped.side[1:] == split.side[1:]


@given(graphs(max_vertices=10))
def test_split_is_balanced(graph):
    split = balanced_bicolouring(graph)

    assert split.violations(graph) == []
    for v, (blue, red) in enumerate(split.counts(graph)):
        assert blue + red == graph.degrees[v]

    for v in split.bad_vertices.values():
        assert graph.degrees[v] % 2 == 0


def test_split_is_deterministic(q4):
    assert balanced_bicolouring(q4) == balanced_bicolouring(q4)
