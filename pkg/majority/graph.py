from dataclasses import dataclass
from functools import cached_property
from typing import Annotated, Iterable, NamedTuple, Optional, Sequence

import networkx as nx
import numpy as np
import pydantic

from .errors import ColouringInputError, GraphConstructionError, PreconditionError


class Graph(pydantic.BaseModel):
    """
    Immutable simple graph over vertices 0..vertex_count-1.
    Edge i joins the pair edges[i]; edge indices are stable for the lifetime of the value.
    """

    model_config = pydantic.ConfigDict(frozen=True)

    vertex_count: Annotated[int, pydantic.Field(ge=0)]
    edges: tuple[tuple[int, int], ...] = ()

    @pydantic.model_validator(mode="after")
    def check_simple(self):
        seen: set[tuple[int, int]] = set()
        for u, v in self.edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(
                    f"edge ({u}, {v}) has an endpoint outside 0..{self.vertex_count - 1}"
                )
            if u == v:
                raise ValueError(f"edge ({u}, {v}) is a self-loop")

            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"edge ({u}, {v}) is a duplicate edge")
            seen.add(key)

        return self

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """
        Per-vertex (neighbour, edge index) pairs in increasing edge index order.
        """

        lists: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for e, (u, v) in enumerate(self.edges):
            lists[u].append((v, e))
            lists[v].append((u, e))
        return tuple(map(tuple, lists))

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(incident) for incident in self.adjacency)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def degree(self, v: int) -> int:
        return self.degrees[v]

    def other_end(self, e: int, v: int) -> int:
        u, w = self.edges[e]
        return w if u == v else u

    def edge_subgraph(self, edge_ids: Sequence[int]) -> "Graph":
        """
        Graph on the same vertex set keeping only the listed edges.
        Edge i of the result is edge edge_ids[i] of this graph.
        """

        # A subset of a simple edge list is simple, revalidation is skipped.
        return Graph.model_construct(
            vertex_count=self.vertex_count,
            edges=tuple(self.edges[e] for e in edge_ids),
        )


def build_graph(vertex_count: int, edge_pairs: Iterable[Sequence[int]]) -> Graph:
    try:
        return Graph(
            vertex_count=vertex_count,
            edges=tuple((int(u), int(v)) for u, v in edge_pairs),
        )
    except pydantic.ValidationError as err:
        raise GraphConstructionError(err.errors()[0]["msg"].removeprefix("Value error, "))


class EdgeColouring(pydantic.BaseModel):
    """
    Total map from edge index to colour in 1..colour_count.
    """

    model_config = pydantic.ConfigDict(frozen=True)

    colours: tuple[int, ...]
    colour_count: Annotated[int, pydantic.Field(ge=1)]

    @pydantic.model_validator(mode="after")
    def check_range(self):
        for e, c in enumerate(self.colours):
            if not 1 <= c <= self.colour_count:
                raise ValueError(
                    f"edge {e} has colour {c} outside 1..{self.colour_count}"
                )
        return self

    def classes(self) -> list[list[int]]:
        """
        Colour classes as edge index lists; classes[i - 1] holds the edges of colour i.
        """

        result: list[list[int]] = [[] for _ in range(self.colour_count)]
        for e, c in enumerate(self.colours):
            result[c - 1].append(e)
        return result


class MajorityWitness(NamedTuple):
    vertex: int
    colour: int
    count: int
    cap: int


@dataclass(frozen=True)
class MajorityVerdict:
    passed: bool
    counts: np.ndarray  # shape (vertex_count, colour_count), column i - 1 for colour i
    witness: Optional[MajorityWitness]

    def summary(self) -> dict:
        return {
            "pass": self.passed,
            "witness": None if self.witness is None else self.witness._asdict(),
        }


def check_majority(graph: Graph, colouring: EdgeColouring, k: int) -> MajorityVerdict:
    """
    Checks that every colour appears at most floor(d(v)/k) times at every vertex v.
    The witness is the first violation in (vertex, colour) order.
    """

    if k < 2:
        raise ValueError("k must be at least 2")
    if len(colouring.colours) != graph.edge_count:
        raise ColouringInputError(
            f"colouring covers {len(colouring.colours)} edges, graph has {graph.edge_count}"
        )

    colours = np.asarray(colouring.colours, dtype=np.int64)
    if colours.size and (colours.min() < 1 or colours.max() > colouring.colour_count):
        raise ColouringInputError(f"colour ids must lie in 1..{colouring.colour_count}")

    counts = np.zeros((graph.vertex_count, colouring.colour_count), dtype=np.int64)
    if graph.edge_count:
        ends = np.asarray(graph.edges, dtype=np.int64)
        np.add.at(counts, (ends[:, 0], colours - 1), 1)
        np.add.at(counts, (ends[:, 1], colours - 1), 1)

    caps = np.asarray(graph.degrees, dtype=np.int64) // k
    violations = np.argwhere(counts > caps[:, None])
    if len(violations) == 0:
        return MajorityVerdict(passed=True, counts=counts, witness=None)

    v, i = (int(a) for a in violations[0])
    return MajorityVerdict(
        passed=False,
        counts=counts,
        witness=MajorityWitness(vertex=v, colour=i + 1, count=int(counts[v, i]), cap=int(caps[v])),
    )


def to_multigraph(
    graph: Graph, edge_ids: Optional[Iterable[int]] = None, isolated: bool = False
) -> nx.MultiGraph:
    """
    networkx view of the listed edges (all by default), keyed by edge index.
    Edges go in by increasing index, so neighbours are iterated in the order of their
    connecting edge. Vertices without a listed edge are left out unless isolated is set.
    """

    network = nx.MultiGraph()
    if isolated:
        network.add_nodes_from(range(graph.vertex_count))

    ids = range(graph.edge_count) if edge_ids is None else sorted(set(edge_ids))
    for e in ids:
        u, v = graph.edges[e]
        network.add_edge(u, v, key=e)
    return network


def edge_between(network: nx.MultiGraph, u: int, v: int) -> int:
    return next(iter(network[u][v]))


def components(graph: Graph) -> list[list[int]]:
    """
    Connected components as sorted vertex lists, ordered by their lowest vertex.
    """

    network = to_multigraph(graph, isolated=True)
    return sorted(sorted(block) for block in nx.connected_components(network))


def edge_components(graph: Graph, edge_ids: Iterable[int]) -> list[tuple[list[int], list[int]]]:
    """
    Components of the subgraph formed by the given edges, as (vertices, edges) pairs.
    Vertices without a listed edge are ignored; both lists are sorted and
    components are ordered by their lowest vertex.
    """

    network = to_multigraph(graph, edge_ids)
    return sorted(
        (sorted(block), sorted(e for _, _, e in network.edges(block, keys=True)))
        for block in nx.connected_components(network)
    )


@dataclass(frozen=True)
class BipartiteCheck:
    sides: Optional[tuple[int, ...]]
    odd_cycle: Optional[tuple[int, ...]]

    @property
    def bipartite(self) -> bool:
        return self.sides is not None


def is_bipartite(graph: Graph) -> BipartiteCheck:
    """
    Two-colours the vertices with the lowest vertex of every component on side 0,
    or returns an odd cycle as an edge sequence.
    """

    network = to_multigraph(graph, isolated=True)

    if nx.is_bipartite(network):
        colour = nx.bipartite.color(network)
        sides = [0] * graph.vertex_count
        for block in nx.connected_components(network):
            flip = colour[min(block)]
            for v in block:
                sides[v] = colour[v] ^ flip
        return BipartiteCheck(sides=tuple(sides), odd_cycle=None)

    # Even cycles only span even cycles, so some basis cycle of a non-bipartite graph is odd.
    odd = next(c for c in nx.cycle_basis(nx.Graph(network)) if len(c) % 2)
    return BipartiteCheck(
        sides=None,
        odd_cycle=tuple(edge_between(network, a, b) for a, b in zip(odd, odd[1:] + odd[:1])),
    )


def eulerian_circuit(graph: Graph) -> list[int]:
    """
    Closed walk through every edge exactly once, starting at the lowest non-isolated vertex.
    """

    if graph.edge_count == 0:
        raise PreconditionError("an Eulerian circuit needs at least one edge")

    odd = [v for v, d in enumerate(graph.degrees) if d % 2]
    if odd:
        raise PreconditionError(f"vertices {odd} have odd degree")

    network = to_multigraph(graph)
    blocks = nx.number_connected_components(network)
    if blocks > 1:
        raise PreconditionError(f"edges form {blocks} components")

    return [e for _, _, e in nx.eulerian_circuit(network, source=min(network), keys=True)]
