import itertools
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import graphs
from majority.errors import GraphConstructionError
from majority.graph import EdgeColouring, check_majority, is_bipartite
from majority.instances import (
    bipartite_lower_bound,
    exhaustive_search,
    general_lower_bound,
    parity_infeasible,
    pigeonhole_infeasible,
    random_min_degree_graph,
)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_bipartite_lower_bound(k):
    a = k * k - k
    graph = bipartite_lower_bound(k)

    assert is_bipartite(graph).bipartite
    assert graph.edge_count == a * a - 1
    assert Counter(graph.degrees) == {a: 2 * a - 2, a - 1: 2}

    outcome = exhaustive_search(graph, k, k + 1)
    assert outcome.result == "infeasible"
    assert outcome.node_count == 0
    assert pigeonhole_infeasible(graph, k, k + 1)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_general_lower_bound(k):
    graph = general_lower_bound(k)
    size = k * k + 1

    assert graph.vertex_count == size + 1
    assert graph.edge_count == size * (size - 1) // 2
    assert Counter(graph.degrees) == {k * k - 1: size, size: 1}
    assert not pigeonhole_infeasible(graph, k, k + 1)
    assert parity_infeasible(graph, k, k + 1)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_general_lower_bound_is_certified_by_search(k):
    outcome = exhaustive_search(general_lower_bound(k), k, k + 1)

    assert outcome.result == "infeasible"
    assert outcome.node_count == 0


def test_parity_certificate_agrees_with_backtracking(monkeypatch):
    monkeypatch.setattr("majority.instances.parity_infeasible", pigeonhole_infeasible)
    outcome = exhaustive_search(general_lower_bound(2), 2, 3)

    assert outcome.result == "infeasible"
    assert 0 < outcome.node_count < 3**10


def test_search_limit(k9):
    outcome = exhaustive_search(k9, 2, 3, node_limit=5)
    assert outcome.result == "inconclusive"
    assert outcome.node_count == 5


def test_search_finds_colouring(q4):
    outcome = exhaustive_search(q4, 2, 3)
    assert outcome.result == "found"
    assert check_majority(q4, outcome.colouring, 2).passed


@given(graphs(max_vertices=5).filter(lambda g: g.edge_count <= 6), st.sampled_from([2, 3]))
def test_search_matches_enumeration(graph, k):
    exists = any(
        check_majority(graph, EdgeColouring(colours=colours, colour_count=3), k).passed
        for colours in itertools.product(range(1, 4), repeat=graph.edge_count)
    )
    outcome = exhaustive_search(graph, k, 3)

    assert not outcome.limit_hit
    assert (outcome.colouring is not None) == exists
    if exists:
        assert check_majority(graph, outcome.colouring, k).passed


@given(
    st.integers(min_value=4, max_value=30),
    st.integers(min_value=1, max_value=6),
    st.booleans(),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_random_graph(n, delta, bipartite, seed):
    regular_degree = delta + n * delta % 2
    if (bipartite and n // 2 < delta) or (not bipartite and n <= regular_degree):
        with pytest.raises(GraphConstructionError):
            random_min_degree_graph(n, delta, bipartite, seed)
        return

    graph = random_min_degree_graph(n, delta, bipartite, seed, extra_edges=3)

    assert graph.vertex_count == n
    assert graph.min_degree >= delta
    assert is_bipartite(graph).bipartite or not bipartite
    assert graph == random_min_degree_graph(n, delta, bipartite, seed, extra_edges=3)


def test_random_graph_errors():
    with pytest.raises(GraphConstructionError):
        random_min_degree_graph(5, 5)
    with pytest.raises(GraphConstructionError):
        random_min_degree_graph(6, 4, bipartite=True)
    with pytest.raises(GraphConstructionError):
        random_min_degree_graph(1, 0, extra_edges=1)
    with pytest.raises(GraphConstructionError):
        random_min_degree_graph(4, -1)


@pytest.mark.parametrize(("n", "delta"), [(10, 7), (9, 6), (12, 11), (20, 3), (7, 0)])
def test_random_graph_is_regular_without_extras(n, delta):
    graph = random_min_degree_graph(n, delta, seed=11)

    assert graph.vertex_count == n
    assert set(graph.degrees) == {delta}
    assert graph.edge_count == n * delta // 2
    assert len({tuple(sorted(pair)) for pair in graph.edges}) == graph.edge_count


def test_random_graph_odd_degree_sum_rounds_up():
    graph = random_min_degree_graph(9, 3, seed=5)
    assert set(graph.degrees) == {4}
