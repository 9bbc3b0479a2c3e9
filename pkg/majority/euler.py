from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Optional

import networkx as nx
import structlog

from .errors import SelectorExhaustedError
from .graph import Graph, edge_components, to_multigraph

logger = structlog.stdlib.get_logger("euler")

# Rank of a vertex as the bad vertex of its component, lower is preferred; None forbids it.
BadSelector = Callable[[int], Optional[int]]


def any_vertex(v: int) -> Optional[int]:
    return 0


def no_vertex(v: int) -> Optional[int]:
    return None


def degree_selector(degrees: tuple[int, ...], allowed: set[int]) -> BadSelector:
    """
    Allows only vertices whose degree in the given sequence lies in the allowed set.
    """

    def select(v: int) -> Optional[int]:
        return 0 if degrees[v] in allowed else None

    return select


class Side(IntEnum):
    BLUE = 0
    RED = 1


@dataclass(frozen=True)
class Bicolouring:
    side: tuple[Side, ...]
    # lowest vertex of the component -> its bad vertex
    bad_vertices: dict[int, int] = field(default_factory=dict)

    def edges_of(self, side: Side) -> list[int]:
        return [e for e, s in enumerate(self.side) if s == side]

    def counts(self, graph: Graph) -> list[tuple[int, int]]:
        """
        Per-vertex (blue, red) edge counts.
        """

        blue = [0] * graph.vertex_count
        red = [0] * graph.vertex_count
        for e, (u, v) in enumerate(graph.edges):
            target = red if self.side[e] == Side.RED else blue
            target[u] += 1
            target[v] += 1
        return list(zip(blue, red))

    def violations(self, graph: Graph) -> list[str]:
        problems = []
        bad = set(self.bad_vertices.values())
        for v, (blue, red) in enumerate(self.counts(graph)):
            d = blue + red
            if v in bad:
                if d % 2 or red != d // 2 + 1:
                    problems.append(f"bad vertex {v} has {blue} blue and {red} red edges")
            elif max(blue, red) > (d + 1) // 2:
                problems.append(f"vertex {v} has {blue} blue and {red} red edges")
        return problems

    def with_side(self, e: int, side: Side) -> "Bicolouring":
        sides = list(self.side)
        sides[e] = side
        return Bicolouring(side=tuple(sides), bad_vertices=dict(self.bad_vertices))


def balanced_bicolouring(graph: Graph, bad_selector: Optional[BadSelector] = None) -> Bicolouring:
    """
    Colours the edges blue and red so that every vertex sees at most ceil(d/2) edges of each
    colour. A component whose degrees are all even and whose edge count is odd cannot be
    balanced everywhere: one vertex chosen by bad_selector receives d/2 + 1 red edges.
    """

    select = bad_selector or any_vertex
    aux = graph.vertex_count
    side: list[Optional[Side]] = [None] * graph.edge_count
    bad_vertices: dict[int, int] = {}

    for vertices, edges in edge_components(graph, range(graph.edge_count)):
        network = to_multigraph(graph, edges)
        odd = [v for v in vertices if graph.degrees[v] % 2]

        if odd:
            # Auxiliary vertex joined to all odd vertices; its edges take ids after the real ones.
            for j, v in enumerate(odd):
                network.add_edge(v, aux, key=graph.edge_count + j)
            start, first = aux, Side.BLUE
        elif len(edges) % 2 == 0:
            start, first = vertices[0], Side.BLUE
        else:
            ranked = [(rank, v) for v in vertices if (rank := select(v)) is not None]
            if not ranked:
                raise SelectorExhaustedError(
                    f"component at vertex {vertices[0]} with {len(edges)} edges "
                    "needs a bad vertex but none is allowed"
                )
            start = min(ranked)[1]
            first = Side.RED
            bad_vertices[vertices[0]] = start

        circuit = nx.eulerian_circuit(network, source=start, keys=True)
        for i, (_, _, e) in enumerate(circuit):
            if e < graph.edge_count:
                side[e] = first if i % 2 == 0 else Side(1 - first)

    logger.debug("edges bicoloured", edges=graph.edge_count, bad_vertices=len(bad_vertices))
    return Bicolouring(side=tuple(side), bad_vertices=bad_vertices)
