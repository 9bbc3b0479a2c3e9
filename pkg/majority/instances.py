from dataclasses import dataclass
from typing import Optional

import networkx as nx
import numpy as np
import structlog

from . import config
from .errors import GraphConstructionError
from .graph import EdgeColouring, Graph, build_graph

logger = structlog.stdlib.get_logger("instances")


def bipartite_lower_bound(k: int) -> Graph:
    """
    K_{a,a} with a = k^2 - k, minus the edge between the first vertices of each side.
    Vertices 0..a-1 form one side and a..2a-1 the other.
    """

    if k < 2:
        raise ValueError("k must be at least 2")

    a = k * k - k
    pairs = [(i, a + j) for i in range(a) for j in range(a) if (i, j) != (0, 0)]
    return build_graph(2 * a, pairs)


def general_lower_bound(k: int) -> Graph:
    """
    Complete graph on k^2 + 1 vertices without the Hamilton cycle 0, 1, ..., k^2,
    plus an apex (the last vertex) joined to all of them.
    """

    if k < 2:
        raise ValueError("k must be at least 2")

    size = k * k + 1
    pairs = [
        (i, j)
        for i in range(size)
        for j in range(i + 1, size)
        if j != i + 1 and not (i == 0 and j == size - 1)
    ]
    pairs.extend((i, size) for i in range(size))
    return build_graph(size + 1, pairs)


def pigeonhole_infeasible(graph: Graph, k: int, colour_count: int) -> bool:
    """
    True when some vertex has more edges than colour_count colours can hold at floor(d/k) each.
    """

    return any(colour_count * (d // k) < d for d in graph.degrees)


def parity_infeasible(graph: Graph, k: int, colour_count: int) -> bool:
    """
    Degree-sum parity certificate. A vertex with colour_count * floor(d/k) = d carries every
    colour exactly floor(d/k) times. When all vertices but one are like that, the degree sum
    of each colour class fixes the parity of that colour at the remaining vertex, which may
    leave too little room for its edges.
    """

    if pigeonhole_infeasible(graph, k, colour_count):
        return True

    caps = [d // k for d in graph.degrees]
    loose = [v for v, d in enumerate(graph.degrees) if colour_count * caps[v] != d]
    if len(loose) != 1:
        return False

    x = loose[0]
    fixed = sum(caps) - caps[x]
    room = caps[x] if (fixed + caps[x]) % 2 == 0 else caps[x] - 1
    return colour_count * room < graph.degrees[x]


def _regular_edges(n: int, d: int, rng: np.random.RandomState) -> set[tuple[int, int]]:
    # dense degrees are drawn as the complement of a sparse regular graph
    if 2 * d > n - 1:
        network = nx.complement(nx.random_regular_graph(n - 1 - d, n, seed=rng))
    else:
        network = nx.random_regular_graph(d, n, seed=rng)
    return {(min(u, v), max(u, v)) for u, v in network.edges()}


def _bipartite_edges(
    left: int, right: int, d: int, rng: np.random.RandomState
) -> set[tuple[int, int]]:
    # d shifted perfect matchings between the left side and `left` chosen right vertices
    order = rng.permutation(right)
    relabel = rng.permutation(left)
    edges = {
        (int(relabel[i]), left + int(order[(i + t) % left])) for t in range(d) for i in range(left)
    }
    for j in order[left:]:
        edges.update((int(i), left + int(j)) for i in rng.choice(left, size=d, replace=False))
    return edges


def random_min_degree_graph(
    n: int, delta: int, bipartite: bool = False, seed: int = 0, extra_edges: int = 0
) -> Graph:
    """
    Random simple graph on n vertices with minimum degree at least delta.

    General graphs start from a random delta-regular graph (delta + 1 when n * delta is odd).
    Bipartite graphs split the vertices into halves of n // 2 and n - n // 2, both at least
    delta, and start from delta disjoint perfect matchings. Then extra_edges random non-edges
    are added where room is left. The output depends only on the arguments.
    """

    if delta < 0 or n < 0 or extra_edges < 0:
        raise GraphConstructionError("sizes must be non-negative")
    if extra_edges and n < 2:
        raise GraphConstructionError("extra edges need at least two vertices")

    rng = np.random.RandomState(np.random.SeedSequence(seed).generate_state(4))

    if bipartite:
        left, right = n // 2, n - n // 2
        if left < max(delta, 1):
            raise GraphConstructionError(
                f"bipartite sides {left} and {right} cannot carry minimum degree {delta}"
            )
        edges = _bipartite_edges(left, right, delta, rng)
    else:
        d = delta if n * delta % 2 == 0 else delta + 1
        if n <= d:
            raise GraphConstructionError(f"{n} vertices cannot carry minimum degree {delta}")
        edges = _regular_edges(n, d, rng)

    added = 0
    for _ in range(extra_edges * config.EXTRA_EDGE_ATTEMPTS):
        if added == extra_edges:
            break
        if bipartite:
            u, v = int(rng.randint(left)), left + int(rng.randint(right))
        else:
            u, v = sorted(int(x) for x in rng.choice(n, size=2, replace=False))
        if (u, v) not in edges:
            edges.add((u, v))
            added += 1

    logger.debug("random graph generated", n=n, delta=delta, bipartite=bipartite, seed=seed)
    return build_graph(n, sorted(edges))


@dataclass(frozen=True)
class SearchOutcome:
    colouring: Optional[EdgeColouring]
    node_count: int
    limit_hit: bool

    @property
    def result(self) -> str:
        if self.colouring is not None:
            return "found"
        return "inconclusive" if self.limit_hit else "infeasible"


def exhaustive_search(
    graph: Graph, k: int, colour_count: int, node_limit: int = config.DEFAULT_NODE_LIMIT
) -> SearchOutcome:
    """
    Backtracking search for a colouring with colour_count colours where every colour
    appears at most floor(d/k) times at every vertex.

    Edges are tried by non-increasing smaller endpoint degree, then by index; the first edge
    is fixed to colour 1. Each successful placement counts as one node. Graphs ruled out by
    parity_infeasible return before the first node. Without hitting node_limit a None
    colouring certifies that no such colouring exists.
    """

    if colour_count < 1:
        raise ValueError("colour_count must be positive")

    if parity_infeasible(graph, k, colour_count):
        logger.debug("degree parity rules out a colouring")
        return SearchOutcome(colouring=None, node_count=0, limit_hit=False)

    degrees = graph.degrees
    caps = [d // k for d in degrees]
    order = sorted(
        range(graph.edge_count),
        key=lambda e: (-min(degrees[graph.edges[e][0]], degrees[graph.edges[e][1]]), e),
    )
    m = len(order)
    counts = [[0] * (colour_count + 1) for _ in range(graph.vertex_count)]
    assigned = [0] * m
    next_colour = [1] * (m + 1)
    nodes = 0

    i = 0
    while 0 <= i < m:
        u, v = graph.edges[order[i]]
        top = 1 if i == 0 else colour_count

        c = next_colour[i]
        while c <= top and (counts[u][c] >= caps[u] or counts[v][c] >= caps[v]):
            c += 1

        if c <= top:
            if nodes >= node_limit:
                logger.debug("search limit hit", nodes=nodes)
                return SearchOutcome(colouring=None, node_count=nodes, limit_hit=True)

            nodes += 1
            counts[u][c] += 1
            counts[v][c] += 1
            assigned[i] = c
            next_colour[i] = c + 1
            i += 1
            next_colour[i] = 1
        else:
            i -= 1
            if i >= 0:
                u, v = graph.edges[order[i]]
                counts[u][assigned[i]] -= 1
                counts[v][assigned[i]] -= 1

    logger.debug("search finished", nodes=nodes, found=i == m)
    if i < 0:
        return SearchOutcome(colouring=None, node_count=nodes, limit_hit=False)

    colours = [0] * m
    for position, e in enumerate(order):
        colours[e] = assigned[position]
    return SearchOutcome(
        colouring=EdgeColouring(colours=tuple(colours), colour_count=colour_count),
        node_count=nodes,
        limit_hit=False,
    )
