"""
Exact rounding of fractional edge weights to a 0/1 edge selection.

Given weights z(e) in [0, 1], round_weights produces x(e) in {0, 1} such that
  (i)   sum_z(v) - 1 < sum_x(v) <= sum_z(v) + 1 at every vertex,
  (ii)  no edge uv has x(uv) = 0 while both u and v are strictly below their weight sums,
  (iii) the vertices reaching sum_z(v) + 1 each lie on an odd cycle of integral-sum vertices,
        and these cycles are pairwise disjoint with no edge between them.
All arithmetic is carried out over fractions.Fraction.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

import networkx as nx
import pydantic
import structlog

from .errors import InternalInvariantError, WeightError
from .graph import Graph, edge_between, to_multigraph

HALF = Fraction(1, 2)

logger = structlog.stdlib.get_logger("rounding")


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class WeightAssignment(pydantic.BaseModel):
    """
    Rational weight per edge index, every value within [0, 1].
    """

    model_config = pydantic.ConfigDict(frozen=True, arbitrary_types_allowed=True)

    z: tuple[Fraction, ...]

    @pydantic.field_validator("z", mode="before")
    @classmethod
    def exact_values(cls, values):
        try:
            return tuple(Fraction(value) for value in values)
        except (TypeError, ValueError) as err:
            raise ValueError(f"weights must be rational numbers: {err}")

    @pydantic.model_validator(mode="after")
    def check_range(self):
        for e, value in enumerate(self.z):
            if not 0 <= value <= 1:
                raise ValueError(f"weight of edge {e} is {value}, outside [0, 1]")
        return self

    @classmethod
    def of(cls, values: Iterable) -> "WeightAssignment":
        try:
            return cls(z=tuple(values))
        except pydantic.ValidationError as err:
            raise WeightError(err.errors()[0]["msg"].removeprefix("Value error, "))

    @classmethod
    def constant(cls, graph: Graph, value) -> "WeightAssignment":
        return cls.of([Fraction(value)] * graph.edge_count)


@dataclass(frozen=True)
class KernelDirection:
    """
    Edge coefficients whose sums vanish at the constrained vertices of one support component.
    """

    alpha: dict[int, Fraction]

    def vertex_sums(self, graph: Graph) -> dict[int, Fraction]:
        sums: dict[int, Fraction] = {}
        for e, a in self.alpha.items():
            for v in graph.edges[e]:
                sums[v] = sums.get(v, Fraction(0)) + a
        return sums


@dataclass(frozen=True)
class RoundingResult:
    x: tuple[int, ...]
    exceptional: tuple[tuple[int, tuple[int, ...]], ...]
    saturations: int = 0

    def selected(self) -> list[int]:
        return [e for e, value in enumerate(self.x) if value == 1]

    def ledger(self) -> list[dict]:
        return [{"vertex": v, "cycle": list(cycle)} for v, cycle in self.exceptional]


class SupportView:
    """
    Mutable view of the edges whose current value is still fractional, held as a
    networkx multigraph keyed by edge index. Vertices leave the view with their last edge.
    """

    def __init__(self, graph: Graph, edge_ids: Iterable[int]):
        self.graph = graph
        self.network = to_multigraph(graph, edge_ids)

    def __contains__(self, e: int) -> bool:
        u, v = self.graph.edges[e]
        return self.network.has_edge(u, v, key=e)

    def degree(self, v: int) -> int:
        return self.network.degree(v) if v in self.network else 0

    def incident(self, v: int) -> list[tuple[int, int]]:
        """
        (edge, neighbour) pairs at v in increasing edge index order.
        """

        return sorted((e, w) for _, w, e in self.network.edges(v, keys=True))

    def remove(self, e: int):
        u, v = self.graph.edges[e]
        self.network.remove_edge(u, v, key=e)
        self.network.remove_nodes_from([end for end in (u, v) if self.network.degree(end) == 0])

    def edges(self) -> list[int]:
        return sorted(e for _, _, e in self.network.edges(keys=True))

    def component_edges(self, component: Iterable[int]) -> list[int]:
        return sorted({e for _, _, e in self.network.edges(component, keys=True)})

    def components(self) -> list[list[int]]:
        return sorted(sorted(block) for block in nx.connected_components(self.network))


class _Cycle(NamedTuple):
    # vertices[i] is the start of edges[i]; edges[-1] returns to vertices[0]
    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    def rotated(self, start: int) -> "_Cycle":
        i = self.vertices.index(start)
        return _Cycle(self.vertices[i:] + self.vertices[:i], self.edges[i:] + self.edges[:i])


def _trace_cycle(graph: Graph, edge_ids: Iterable[int]) -> _Cycle:
    """
    Orders a connected 2-regular edge set into a closed walk from its lowest vertex,
    leaving along the lower indexed edge.
    """

    network = to_multigraph(graph, edge_ids)
    if network.number_of_edges() == 0:
        raise InternalInvariantError("edge set is empty")
    if any(d != 2 for _, d in network.degree()):
        raise InternalInvariantError("edge set is not 2-regular")
    if not nx.is_connected(network):
        raise InternalInvariantError("edge set is not a single cycle")

    walk = list(nx.eulerian_circuit(network, source=min(network), keys=True))
    if walk[0][2] > walk[-1][2]:
        walk = [(v, u, e) for u, v, e in reversed(walk)]
    return _Cycle(tuple(u for u, _, _ in walk), tuple(e for _, _, e in walk))


class _SearchTree:
    """
    Breadth-first tree of the support, grown on demand from nx.bfs_edges.
    Vertices must be expanded in the order they appear in `order`.
    """

    def __init__(self, support: SupportView, root: int):
        self.graph = support.graph
        self.network = support.network
        self.parent: dict[int, Optional[int]] = {root: None}
        self.depth: dict[int, int] = {root: 0}
        self.order = [root]
        self._stream = nx.bfs_edges(support.network, root)
        self._pending = next(self._stream, None)

    def expand(self, u: int) -> list[int]:
        """
        Attaches and returns the children of u.
        """

        children = []
        while self._pending is not None and self._pending[0] == u:
            _, w = self._pending
            self.parent[w] = edge_between(self.network, u, w)
            self.depth[w] = self.depth[u] + 1
            self.order.append(w)
            children.append(w)
            self._pending = next(self._stream, None)
        return children

    def path(self, a: int, b: int) -> tuple[list[int], list[int]]:
        """
        Tree path from a to b as (vertices, edges).
        """

        head_vertices, head_edges = [a], []
        tail_vertices, tail_edges = [b], []
        while a != b:
            if self.depth[a] >= self.depth[b]:
                e = self.parent[a]
                a = self.graph.other_end(e, a)
                head_edges.append(e)
                head_vertices.append(a)
            else:
                e = self.parent[b]
                b = self.graph.other_end(e, b)
                tail_edges.append(e)
                tail_vertices.append(b)

        return head_vertices + tail_vertices[-2::-1], head_edges + tail_edges[::-1]

    def fundamental_cycle(self, u: int, w: int, e: int) -> _Cycle:
        vertices, edges = self.path(u, w)
        return _Cycle(tuple(vertices), tuple(edges + [e]))


def _alternating(cycle: _Cycle) -> KernelDirection:
    return KernelDirection(alpha={e: Fraction((-1) ** i) for i, e in enumerate(cycle.edges)})


def _combine_odd_cycles(
    graph: Graph, tree: _SearchTree, first: _Cycle, second: _Cycle
) -> KernelDirection:
    shared = set(first.vertices) & set(second.vertices)
    if len(shared) >= 2:
        # Two fundamental cycles meeting in a path: their symmetric difference is one even cycle.
        return _alternating(_trace_cycle(graph, set(first.edges) ^ set(second.edges)))

    if shared:
        junction = shared.pop()
        path_vertices, path_edges = [junction], []
    else:
        vertices, edges = tree.path(first.vertices[0], second.vertices[0])
        on_first = set(first.vertices)
        on_second = set(second.vertices)
        i = max(j for j, v in enumerate(vertices) if v in on_first)
        j = next(j for j in range(i + 1, len(vertices)) if vertices[j] in on_second)
        path_vertices, path_edges = vertices[i : j + 1], edges[i:j]

    alpha: dict[int, Fraction] = {}
    for i, e in enumerate(first.rotated(path_vertices[0]).edges):
        alpha[e] = Fraction((-1) ** i)
    for i, e in enumerate(path_edges):
        alpha[e] = Fraction(2 * (-1) ** (i + 1))

    sign = (-1) ** (len(path_edges) + 1)
    for i, e in enumerate(second.rotated(path_vertices[-1]).edges):
        alpha[e] = Fraction(sign * (-1) ** i)

    return KernelDirection(alpha=alpha)


def _search_kernel(support: SupportView, root: int) -> tuple[Optional[KernelDirection], set[int]]:
    """
    Breadth-first search from root that stops at the first even fundamental cycle
    or the second odd one. Returns the direction and the explored vertices.
    """

    graph = support.graph
    tree = _SearchTree(support, root)
    handled: set[int] = set()
    odd: Optional[_Cycle] = None

    for u in tree.order:
        tree.expand(u)
        for e, w in support.incident(u):
            if e in (tree.parent[u], tree.parent.get(w)) or e in handled:
                continue

            handled.add(e)
            cycle = tree.fundamental_cycle(u, w, e)
            if len(cycle.edges) % 2 == 0:
                return _alternating(cycle), set(tree.depth)
            if odd is None:
                odd = cycle
            else:
                return _combine_odd_cycles(graph, tree, odd, cycle), set(tree.depth)

    return None, set(tree.depth)


def find_kernel_direction(
    support: SupportView, component: Iterable[int]
) -> Optional[KernelDirection]:
    """
    Finds a nonzero edge vector over the component whose sum vanishes at every vertex.
    One exists iff the component holds an even cycle or two cycles; trees and
    single odd cycles yield None.
    """

    return _search_kernel(support, min(component))[0]


def pendant_direction(support: SupportView, component: Sequence[int]) -> KernelDirection:
    """
    Direction whose sums vanish at the support vertices of degree at least two.
    A path between two leaves alternates +1/-1; with a single leaf the component is a
    path hanging off an odd cycle, and the cycle carries alternating halves.
    """

    graph = support.graph
    leaves = [v for v in component if support.degree(v) == 1]
    if not leaves or all(support.degree(v) == 1 for v in component):
        raise InternalInvariantError(
            "pendant direction needs a leaf and an inner vertex in the component"
        )

    if len(leaves) >= 2:
        start = leaves[0]
        tree = _SearchTree(support, start)
        target = None
        for u in tree.order:
            target = next((w for w in tree.expand(u) if support.degree(w) == 1), None)
            if target is not None:
                break

        _, edges = tree.path(start, target)
        return KernelDirection(alpha={e: Fraction((-1) ** i) for i, e in enumerate(edges)})

    # One leaf: walk the handle down to the junction vertex of degree three.
    current, previous = leaves[0], None
    handle: list[int] = []
    while support.degree(current) <= 2:
        e = next(f for f, _ in support.incident(current) if f != previous)
        handle.append(e)
        previous, current = e, graph.other_end(e, current)
        if support.degree(current) == 1:
            raise InternalInvariantError("pendant path ends in a second leaf")
    if support.degree(current) != 3:
        raise InternalInvariantError(
            f"junction vertex {current} has support degree {support.degree(current)}"
        )

    junction = current
    loop: list[int] = []
    e = min(f for f, _ in support.incident(junction) if f != handle[-1])
    while True:
        loop.append(e)
        current = graph.other_end(e, current)
        if current == junction:
            break
        e = next(f for f, _ in support.incident(current) if f != e)

    if len(loop) % 2 == 0:
        raise InternalInvariantError("pendant cycle is even")

    alpha = {e: Fraction((-1) ** i) for i, e in enumerate(handle)}
    sign = (-1) ** len(handle)
    for i, e in enumerate(loop):
        alpha[e] = sign * (-1) ** i * HALF
    return KernelDirection(alpha=alpha)


def saturate(x: list[Fraction], direction: KernelDirection, support: SupportView) -> list[int]:
    """
    Moves x along the direction as far as [0, 1] allows, in the sign that makes more
    edges integral (then the one reaching the lower edge index, then +1).
    Edges turned integral are dropped from the support and returned.
    """

    best = None
    for sign in (1, -1):
        limits: dict[int, Fraction] = {}
        for e, a in direction.alpha.items():
            a = sign * a
            limits[e] = (1 - x[e]) / a if a > 0 else x[e] / -a

        step = min(limits.values())
        hit = sorted(e for e, limit in limits.items() if limit == step)
        key = (-len(hit), hit[0])
        if best is None or key < best[0]:
            best = (key, sign, step, hit)

    _, sign, step, hit = best
    for e, a in direction.alpha.items():
        x[e] += sign * step * a
    for e in hit:
        support.remove(e)

    return hit


def _has_pendant(support: SupportView, component: list[int]) -> bool:
    degrees = [support.degree(v) for v in component]
    return 1 in degrees and max(degrees) >= 2


def resolve_cycles(
    graph: Graph, cycles: Sequence[Sequence[int]], x: Sequence[Fraction]
) -> tuple[list[Fraction], list[tuple[int, tuple[int, ...]]]]:
    """
    Rounds the edges of disjoint odd cycles, keeping every vertex sum within one of its value.
    Bad cycles (all edges at 1/2) joined by an edge of the graph are first made integral
    together by flipping the joining edge. Every remaining bad cycle contributes one
    exceptional vertex, its lowest, which ends up one above its sum.
    """

    x = list(x)
    traced = [_trace_cycle(graph, edges) for edges in cycles]
    bad = {i for i, cycle in enumerate(traced) if all(x[e] == HALF for e in cycle.edges)}

    owner: dict[int, int] = {}
    for i in bad:
        for v in traced[i].vertices:
            owner[v] = i

    for e0, (a, b) in enumerate(graph.edges):
        first, second = owner.get(a), owner.get(b)
        if first is None or second is None or first == second:
            continue
        if first not in bad or second not in bad:
            continue

        flip = 1 if x[e0] == 0 else -1
        x[e0] += flip
        for i, end in ((first, a), (second, b)):
            for j, e in enumerate(traced[i].rotated(end).edges):
                x[e] -= flip * (-1) ** j * HALF
            bad.discard(i)

    ledger: list[tuple[int, tuple[int, ...]]] = []
    for i, cycle in enumerate(traced):
        if i in bad:
            for j, e in enumerate(cycle.edges):
                x[e] = Fraction(1 - j % 2)
            ledger.append((cycle.vertices[0], cycle.edges))
        elif any(x[e].denominator != 1 for e in cycle.edges):
            _round_nearest(cycle, x)

    return x, ledger


def _round_nearest(cycle: _Cycle, x: list[Fraction]):
    edges = cycle.edges
    # Rotate so that the walk starts right after an edge that is not a tie.
    pivot = next(i for i, e in enumerate(edges) if x[e] != HALF)
    order = edges[pivot + 1 :] + edges[: pivot + 1]

    run: list[int] = []
    for e in order + (None,):
        if e is not None and x[e] == HALF:
            run.append(e)
            continue

        if run:
            lowest = run.index(min(run))
            for j, f in enumerate(run):
                x[f] = Fraction(1 if (j - lowest) % 2 == 0 else 0)
            run = []

        if e is not None:
            x[e] = Fraction(round(x[e]))


def _sums(graph: Graph, values: Sequence) -> list:
    sums = [0] * graph.vertex_count
    for (u, v), value in zip(graph.edges, values):
        sums[u] += value
        sums[v] += value
    return sums


def enforce_condition_ii(graph: Graph, z: Sequence[Fraction], x: Sequence[int]) -> list[int]:
    """
    Sets x(uv) = 1 on every unselected edge whose endpoints both fall short of their
    weight sums. Sums only grow, so one ascending pass over the edges suffices.
    """

    x = list(x)
    z_sums = _sums(graph, z)
    x_sums = _sums(graph, x)
    for e, (u, v) in enumerate(graph.edges):
        if x[e] == 0 and x_sums[u] < z_sums[u] and x_sums[v] < z_sums[v]:
            x[e] = 1
            x_sums[u] += 1
            x_sums[v] += 1
    return x


def rounding_violations(
    graph: Graph,
    z: Sequence[Fraction],
    x: Sequence[int],
    exceptional: Sequence[tuple[int, Sequence[int]]],
) -> list[str]:
    """
    Lists every way in which (x, exceptional) fails conditions (i) to (iii) for weights z.
    An empty list certifies the rounding.
    """

    problems: list[str] = []
    if len(x) != graph.edge_count or len(z) != graph.edge_count:
        return [f"expected {graph.edge_count} values"]
    problems.extend(f"edge {e} has value {value}" for e, value in enumerate(x) if value not in (0, 1))
    if problems:
        return problems

    z_sums = _sums(graph, z)
    x_sums = _sums(graph, x)
    for v in range(graph.vertex_count):
        if not z_sums[v] - 1 < x_sums[v] <= z_sums[v] + 1:
            problems.append(f"(i) vertex {v}: sum {x_sums[v]} against weight {z_sums[v]}")

    for e, (u, v) in enumerate(graph.edges):
        if x[e] == 0 and x_sums[u] < z_sums[u] and x_sums[v] < z_sums[v]:
            problems.append(f"(ii) edge {e} joins two deficient vertices")

    excess = {v for v in range(graph.vertex_count) if x_sums[v] == z_sums[v] + 1}
    listed = [v for v, _ in exceptional]
    if sorted(excess) != sorted(listed):
        problems.append(f"(iii) excess vertices {sorted(excess)} but ledger lists {sorted(listed)}")

    owner: dict[int, int] = {}
    for i, (v, cycle) in enumerate(exceptional):
        try:
            traced = _trace_cycle(graph, cycle)
        except InternalInvariantError as err:
            problems.append(f"(iii) ledger cycle {i}: {err}")
            continue

        if len(set(cycle)) != len(cycle) or len(traced.edges) % 2 == 0:
            problems.append(f"(iii) ledger cycle {i} is not an odd cycle")
        if v not in traced.vertices:
            problems.append(f"(iii) ledger cycle {i} misses its vertex {v}")
        for u in traced.vertices:
            if Fraction(z_sums[u]).denominator != 1:
                problems.append(f"(iii) vertex {u} on ledger cycle {i} has fractional weight")
            if u in owner:
                problems.append(f"(iii) ledger cycles {owner[u]} and {i} share vertex {u}")
            owner[u] = i

    for e, (u, v) in enumerate(graph.edges):
        if u in owner and v in owner and owner[u] != owner[v]:
            problems.append(f"(iii) edge {e} joins ledger cycles {owner[u]} and {owner[v]}")

    return problems


def round_weights(graph: Graph, weights: WeightAssignment) -> RoundingResult:
    if len(weights.z) != graph.edge_count:
        raise WeightError(f"{len(weights.z)} weights given for {graph.edge_count} edges")

    z = weights.z
    x = list(z)
    support = SupportView(graph, (e for e, value in enumerate(z) if value.denominator != 1))
    saturations = 0

    dead: set[int] = set()
    for root in range(graph.vertex_count):
        while root not in dead and support.degree(root):
            direction, explored = _search_kernel(support, root)
            if direction is None:
                dead |= explored
                break
            saturate(x, direction, support)
            saturations += 1

    while True:
        target = next((c for c in support.components() if _has_pendant(support, c)), None)
        if target is None:
            break
        saturate(x, pendant_direction(support, target), support)
        saturations += 1

    cycles: list[list[int]] = []
    for component in support.components():
        edges = support.component_edges(component)
        if len(component) == 2:
            x[edges[0]] = Fraction(1)
        elif any(support.degree(v) != 2 for v in component):
            raise InternalInvariantError(f"support component at {component[0]} is not a cycle")
        else:
            cycles.append(edges)

    x, exceptional = resolve_cycles(graph, cycles, x)
    if any(value.denominator != 1 for value in x):
        raise InternalInvariantError("fractional values remain after cycle resolution")

    selected = enforce_condition_ii(graph, z, [int(value) for value in x])
    problems = rounding_violations(graph, z, selected, exceptional)
    if problems:
        raise InternalInvariantError(f"rounding failed certification: {problems[0]}")

    logger.debug(
        "weights rounded",
        edges=graph.edge_count,
        saturations=saturations,
        exceptional=len(exceptional),
    )
    return RoundingResult(x=tuple(selected), exceptional=tuple(exceptional), saturations=saturations)
