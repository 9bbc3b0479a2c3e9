"""
Graph transforms that confine every degree to S_k = {d : k^2 <= d < 2k^2, d = k-1 mod k}
while keeping floor(d/k) per original vertex, so colourings of the transformed graph
pull back to colourings of the original one.
"""

from dataclasses import dataclass
from typing import Sequence, Union

import structlog

from . import config
from .errors import PreconditionError, SizeGuardError, TraceMismatchError
from .graph import EdgeColouring, Graph

logger = structlog.stdlib.get_logger("reductions")


def in_sk(d: int, k: int) -> bool:
    return k * k <= d < 2 * k * k and d % k == k - 1


def sk_degrees(k: int) -> list[int]:
    return [d for d in range(k * k, 2 * k * k) if in_sk(d, k)]


@dataclass(frozen=True)
class SplitTrace:
    origin: tuple[int, ...]  # new vertex -> original vertex
    edge_bijection: tuple[int, ...]  # new edge -> original edge

    def pull_back(self, colouring: EdgeColouring) -> EdgeColouring:
        if len(colouring.colours) != len(self.edge_bijection):
            raise TraceMismatchError(
                f"split trace covers {len(self.edge_bijection)} edges, "
                f"colouring has {len(colouring.colours)}"
            )

        colours = [0] * len(self.edge_bijection)
        for new, original in enumerate(self.edge_bijection):
            colours[original] = colouring.colours[new]
        return EdgeColouring(colours=tuple(colours), colour_count=colouring.colour_count)


@dataclass(frozen=True)
class LiftTrace:
    copies: int
    embedding: tuple[int, ...]  # original edge -> edge of the lifted graph
    lifted_edge_count: int

    def pull_back(self, colouring: EdgeColouring) -> EdgeColouring:
        if len(colouring.colours) != self.lifted_edge_count:
            raise TraceMismatchError(
                f"lift trace expects {self.lifted_edge_count} edges, "
                f"colouring has {len(colouring.colours)}"
            )

        return EdgeColouring(
            colours=tuple(colouring.colours[e] for e in self.embedding),
            colour_count=colouring.colour_count,
        )


ReductionTrace = Union[SplitTrace, LiftTrace]


def _require_min_degree(graph: Graph, k: int):
    if graph.vertex_count and graph.min_degree < k * k:
        raise PreconditionError(
            f"minimum degree {graph.min_degree} is below k^2 = {k * k}"
        )


def split_high_degree(graph: Graph, k: int) -> tuple[Graph, SplitTrace]:
    """
    Splits every vertex of degree n*k^2 + d with n >= 1 and k^2 <= d < 2k^2 into one part
    of degree d, which keeps the original index, and n new parts of degree k^2.
    Neighbours are handed out in increasing index order, the degree-d part first.
    """

    _require_min_degree(graph, k)
    square = k * k

    origin = list(range(graph.vertex_count))
    # (vertex, edge) -> index of the part holding that edge
    holder: dict[tuple[int, int], int] = {}
    for v in range(graph.vertex_count):
        d = graph.degrees[v]
        if d < 2 * square:
            continue

        n = d // square - 1
        by_neighbour = sorted(graph.adjacency[v])
        sizes = [d - n * square] + [square] * n
        offset = 0
        for part, size in enumerate(sizes):
            if part == 0:
                index = v
            else:
                index = len(origin)
                origin.append(v)
            for _, e in by_neighbour[offset : offset + size]:
                holder[(v, e)] = index
            offset += size

    edges = tuple(
        (holder.get((u, e), u), holder.get((v, e), v)) for e, (u, v) in enumerate(graph.edges)
    )
    split = Graph.model_construct(vertex_count=len(origin), edges=edges)

    logger.debug(
        "high degrees split",
        vertices=graph.vertex_count,
        parts=len(origin) - graph.vertex_count,
    )
    return split, SplitTrace(origin=tuple(origin), edge_bijection=tuple(range(graph.edge_count)))


def raise_to_sk(graph: Graph, k: int) -> tuple[Graph, LiftTrace]:
    """
    Doubles the graph until every degree lies in S_k. Each round places a second copy
    at offset N and joins every vertex outside S_k to its twin, raising its degree by one.
    Edges of the first copy keep their indices, which is the embedding of the original edges.
    """

    if k > config.MAX_LIFT_K:
        raise SizeGuardError(f"lifting is limited to k <= {config.MAX_LIFT_K}, got k = {k}")
    _require_min_degree(graph, k)
    if graph.max_degree >= 2 * k * k:
        raise PreconditionError(
            f"maximum degree {graph.max_degree} is not below 2k^2 = {2 * k * k}"
        )

    current = graph
    copies = 0
    while not all(in_sk(d, k) for d in current.degrees):
        n = current.vertex_count
        twins = [(v, v + n) for v in range(n) if not in_sk(current.degrees[v], k)]
        current = Graph.model_construct(
            vertex_count=2 * n,
            edges=current.edges + tuple((u + n, v + n) for u, v in current.edges) + tuple(twins),
        )
        copies += 1

    logger.debug("degrees lifted", copies=copies, vertices=current.vertex_count)
    return current, LiftTrace(
        copies=copies,
        embedding=tuple(range(graph.edge_count)),
        lifted_edge_count=current.edge_count,
    )


def reduce_to_sk(graph: Graph, k: int) -> tuple[Graph, list[ReductionTrace]]:
    split, split_trace = split_high_degree(graph, k)
    lifted, lift_trace = raise_to_sk(split, k)
    return lifted, [split_trace, lift_trace]


def pull_back_colouring(
    colouring: EdgeColouring, traces: Sequence[ReductionTrace]
) -> EdgeColouring:
    """
    Undoes the traces, given in the order the transforms were applied.
    """

    for trace in reversed(traces):
        colouring = trace.pull_back(colouring)
    return colouring
