import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Annotated, Callable, Optional, Sequence

import networkx as nx
import pydantic
import structlog

from .errors import InternalInvariantError, PreconditionError
from .euler import (
    BadSelector,
    Bicolouring,
    Side,
    balanced_bicolouring,
    any_vertex,
    degree_selector,
    no_vertex,
)
from .graph import (
    EdgeColouring,
    Graph,
    check_majority,
    edge_components,
    is_bipartite,
    to_multigraph,
)
from .instances import exhaustive_search
from .reductions import pull_back_colouring, reduce_to_sk
from .rounding import WeightAssignment, format_rational, round_weights

logger = structlog.stdlib.get_logger("schemes")

ALGORITHMS = ("auto", "bipartite", "general", "refined", "small-k")

# (component vertices, component edge count, per-vertex degree in the component's colour)
BadComponentPredicate = Callable[[Sequence[int], int, Sequence[int]], bool]


class RoundStats(pydantic.BaseModel):
    round: int
    weight: Optional[str] = None
    class_edges: int
    max_class_degree: int
    max_residual_degree: int


class Verdict(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(populate_by_name=True)

    passed: bool = pydantic.Field(alias="pass")
    witness: Optional[dict] = None


class OracleStats(pydantic.BaseModel):
    nodes: int
    limit_hit: bool
    result: str


class SchemeReport(pydantic.BaseModel):
    algorithm: str
    k: Annotated[int, pydantic.Field(ge=2)]
    n: Optional[int] = None
    m: Optional[int] = None
    alpha: list[str] = []
    rounds: list[RoundStats] = []
    stats: dict[str, int] = {}
    verdict: Optional[Verdict] = None
    oracle: Optional[OracleStats] = None


@dataclass(frozen=True)
class Thresholds:
    k: int
    n: int
    m: int
    bipartite: int
    conjectured: int
    refined: Fraction
    corollary: Fraction
    general: int


def refined_parameters(k: int) -> tuple[int, int]:
    """
    Splits k + 1 = 2^n + m with 0 <= m < 2^n.
    """

    n = (k + 1).bit_length() - 1
    return n, k + 1 - 2**n


def thresholds(k: int) -> Thresholds:
    if k < 2:
        raise ValueError("k must be at least 2")

    n, m = refined_parameters(k)
    return Thresholds(
        k=k,
        n=n,
        m=m,
        bipartite=k * (k - 1),
        conjectured=k * k,
        refined=Fraction(3 * k * k + k * m + k, 2),
        corollary=Fraction(7 * k * k, 4) + Fraction(k, 2),
        general=2 * k * k,
    )


def general_weight(delta: int, k: int, i: int) -> Fraction:
    """
    Weight of the i-th rounding in the minimum degree scheme for minimum degree delta.
    """

    share = Fraction(delta, k)
    return (share - 1) / (delta - (i - 1) * (share - 2))


def _degrees(graph: Graph, edge_ids: Sequence[int]) -> list[int]:
    degrees = [0] * graph.vertex_count
    for e in edge_ids:
        u, v = graph.edges[e]
        degrees[u] += 1
        degrees[v] += 1
    return degrees


def _round_class(
    graph: Graph, remaining: list[int], weight: Fraction
) -> tuple[list[int], list[int]]:
    sub = graph.edge_subgraph(remaining)
    result = round_weights(sub, WeightAssignment.constant(sub, weight))
    chosen = [remaining[i] for i, value in enumerate(result.x) if value]
    left = [remaining[i] for i, value in enumerate(result.x) if not value]
    return chosen, left


def _round_stats(
    graph: Graph, i: int, weight: Optional[Fraction], chosen: list[int], remaining: list[int]
) -> RoundStats:
    return RoundStats(
        round=i,
        weight=None if weight is None else format_rational(weight),
        class_edges=len(chosen),
        max_class_degree=max(_degrees(graph, chosen), default=0),
        max_residual_degree=max(_degrees(graph, remaining), default=0),
    )


def _finish(
    graph: Graph, k: int, colouring: EdgeColouring, report: SchemeReport
) -> tuple[EdgeColouring, SchemeReport]:
    verdict = check_majority(graph, colouring, k)
    if not verdict.passed:
        raise InternalInvariantError(
            f"{report.algorithm} scheme produced an invalid colouring: {verdict.witness}"
        )

    report.verdict = Verdict(passed=True)
    logger.info("graph coloured", algorithm=report.algorithm, k=k, edges=graph.edge_count)
    return colouring, report


def _run_bipartite(graph: Graph, k: int) -> tuple[EdgeColouring, SchemeReport]:
    if graph.min_degree < k * (k - 1):
        raise PreconditionError(
            f"minimum degree {graph.min_degree} is below k(k-1) = {k * (k - 1)}"
        )
    if not is_bipartite(graph).bipartite:
        raise PreconditionError("graph is not bipartite")

    colours = [1] * graph.edge_count
    remaining = list(range(graph.edge_count))
    report = SchemeReport(algorithm="bipartite", k=k)
    for i in range(k + 1, 1, -1):
        weight = Fraction(1, i)
        chosen, remaining = _round_class(graph, remaining, weight)
        for e in chosen:
            colours[e] = i
        report.alpha.append(format_rational(weight))
        report.rounds.append(_round_stats(graph, i, weight, chosen, remaining))

    colouring = EdgeColouring(colours=tuple(colours), colour_count=k + 1)
    return _finish(graph, k, colouring, report)


def _general_rounds(
    graph: Graph, k: int, rounds: int, colours: list[int], report: SchemeReport
) -> list[int]:
    """
    Colours classes 1..rounds by rounding the general weights and checks, after every
    round i and for every vertex of degree d = beta*delta, that the class holds at most
    d/k edges and at most beta*(delta - i*(delta/k - 2)) edges remain uncoloured.
    Returns the uncoloured edges.
    """

    delta = graph.min_degree
    remaining = list(range(graph.edge_count))
    for i in range(1, rounds + 1):
        weight = general_weight(delta, k, i)
        chosen, remaining = _round_class(graph, remaining, weight)
        for e in chosen:
            colours[e] = i

        limit = delta - i * (Fraction(delta, k) - 2)
        class_degrees = _degrees(graph, chosen)
        residual = _degrees(graph, remaining)
        for v, d in enumerate(graph.degrees):
            beta = Fraction(d, delta)
            if class_degrees[v] > Fraction(d, k) or residual[v] > beta * limit:
                raise InternalInvariantError(
                    f"round {i} leaves vertex {v} with class degree {class_degrees[v]} "
                    f"and residual degree {residual[v]}"
                )

        report.alpha.append(format_rational(weight))
        report.rounds.append(_round_stats(graph, i, weight, chosen, remaining))

    return remaining


def _run_general(graph: Graph, k: int) -> tuple[EdgeColouring, SchemeReport]:
    if graph.min_degree < 2 * k * k:
        raise PreconditionError(
            f"minimum degree {graph.min_degree} is below 2k^2 = {2 * k * k}"
        )

    colours = [k + 1] * graph.edge_count
    report = SchemeReport(algorithm="general", k=k)
    _general_rounds(graph, k, k, colours, report)

    colouring = EdgeColouring(colours=tuple(colours), colour_count=k + 1)
    return _finish(graph, k, colouring, report)


def _run_refined(graph: Graph, k: int) -> tuple[EdgeColouring, SchemeReport]:
    bounds = thresholds(k)
    n, m = bounds.n, bounds.m
    if graph.vertex_count == 0 or graph.min_degree < bounds.refined:
        raise PreconditionError(
            f"minimum degree {graph.min_degree} is below {format_rational(bounds.refined)}"
        )

    colours = [0] * graph.edge_count
    report = SchemeReport(algorithm="refined", k=k, n=n, m=m)
    remaining = _general_rounds(graph, k, m, colours, report)

    bits: dict[int, tuple[int, ...]] = {e: () for e in remaining}
    determined: set[int] = set()
    # vertex -> prefixes (each ending in 1) it is special for
    special: dict[int, set[tuple[int, ...]]] = defaultdict(set)
    rule_a_components = 0
    bad_vertices = 0

    for level in range(1, n + 1):
        for prefix in itertools.product((0, 1), repeat=level - 1):
            members = [e for e in remaining if e not in determined and bits[e] == prefix]
            if not members:
                continue

            ancestors = [prefix[:j] for j in range(1, len(prefix) + 1)]

            def is_special(v: int) -> bool:
                return any(q in special[v] for q in ancestors)

            to_split: list[int] = []
            for vertices, edges in edge_components(graph, members):
                if not all(is_special(v) for v in vertices):
                    to_split.extend(edges)
                    continue

                if len(vertices) > n:
                    raise InternalInvariantError(
                        f"component of {len(vertices)} special vertices exceeds n = {n}"
                    )
                for e in edges:
                    bits[e] = prefix + (0,) * (n - len(prefix))
                    determined.add(e)
                rule_a_components += 1

            if not to_split:
                continue

            to_split.sort()
            split = balanced_bicolouring(
                graph.edge_subgraph(to_split), lambda v: None if is_special(v) else 0
            )
            for i, e in enumerate(to_split):
                bits[e] = prefix + (int(split.side[i]),)
            for v in split.bad_vertices.values():
                # along one chain of prefixes a vertex turns special at most once
                if is_special(v):
                    raise InternalInvariantError(
                        f"vertex {v} is special twice along prefix {prefix + (1,)}"
                    )
                special[v].add(prefix + (1,))
                bad_vertices += 1

    for e in remaining:
        colours[e] = m + 1 + int("".join(map(str, bits[e])), 2)

    _check_vector_bound(graph, n, m, remaining, colours, determined)
    report.stats = {"rule_a_components": rule_a_components, "bad_vertices": bad_vertices}

    colouring = EdgeColouring(colours=tuple(colours), colour_count=k + 1)
    return _finish(graph, k, colouring, report)


def _check_vector_bound(
    graph: Graph,
    n: int,
    m: int,
    remaining: list[int],
    colours: list[int],
    determined: set[int],
):
    """
    Per-colour counts over the split edges. A pair that holds an edge fixed by a whole
    special component is only bounded by n - 1, the edge count at a vertex of such a component.
    """

    d_h = _degrees(graph, remaining)
    counts: dict[tuple[int, int], int] = defaultdict(int)
    fixed_at_once: set[tuple[int, int]] = set()
    for e in remaining:
        for v in graph.edges[e]:
            counts[(v, colours[e])] += 1
            if e in determined:
                fixed_at_once.add((v, colours[e]))

    for (v, c), count in counts.items():
        if (v, c) in fixed_at_once:
            bound = Fraction(n - 1)
        else:
            bound = Fraction(d_h[v] - 1, 2**n) + Fraction(3, 2)
        if count > bound:
            raise InternalInvariantError(
                f"vertex {v} has {count} edges of colour {c - m}, above {bound}"
            )


def _bad_components(
    graph: Graph, bicolouring: Bicolouring, is_bad: BadComponentPredicate
) -> tuple[int, Optional[tuple[Side, list[int], list[int]]]]:
    counts = bicolouring.counts(graph)
    total = 0
    first = None
    for side in Side:
        class_degree = [pair[side] for pair in counts]
        for vertices, edges in edge_components(graph, bicolouring.edges_of(side)):
            if is_bad(vertices, len(edges), class_degree):
                total += 1
                if first is None:
                    first = (side, vertices, edges)
    return total, first


def eliminate_bad_components(
    graph: Graph, bicolouring: Bicolouring, is_bad: BadComponentPredicate
) -> Bicolouring:
    """
    Recolours single edges until no monochromatic component satisfies is_bad.

    In a bad component a vertex v is picked whose degree in the other colour is odd and one
    less than its degree in the component, together with two neighbours u1, u2 of the same
    kind. If u1 lies outside the other-colour component of v, vu1 is recoloured; otherwise
    vu2 is when u2 lies outside; otherwise vu1 is. Each flip must strictly lower the number
    of bad components.
    """

    count, target = _bad_components(graph, bicolouring, is_bad)
    flips = 0
    while target is not None:
        side, vertices, edges = target
        other = Side(1 - side)
        counts = bicolouring.counts(graph)

        def flippable(v: int) -> bool:
            own, rest = counts[v][side], counts[v][other]
            return rest % 2 == 1 and own == rest + 1

        incident: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for e in edges:
            u, w = graph.edges[e]
            incident[u].append((w, e))
            incident[w].append((u, e))

        choice = None
        for v in vertices:
            if not flippable(v):
                continue
            options = sorted((w, e) for w, e in incident[v] if flippable(w))
            if len(options) >= 2:
                choice = (v, options[0], options[1])
                break
        if choice is None:
            raise InternalInvariantError(
                f"bad component at vertex {vertices[0]} has no recolourable vertex"
            )

        v, (u1, e1), (u2, e2) = choice
        reach = _colour_component(graph, bicolouring, other, v)
        if u1 not in reach:
            flip = e1
        elif u2 not in reach:
            flip = e2
        else:
            flip = e1

        bicolouring = bicolouring.with_side(flip, other)
        flips += 1

        new_count, target = _bad_components(graph, bicolouring, is_bad)
        if new_count >= count:
            raise InternalInvariantError(
                f"recolouring edge {flip} left {new_count} bad components (was {count})"
            )
        count = new_count

    logger.debug("bad components eliminated", flips=flips)
    return bicolouring


def _colour_component(graph: Graph, bicolouring: Bicolouring, side: Side, start: int) -> set[int]:
    network = to_multigraph(graph, bicolouring.edges_of(side))
    network.add_node(start)
    return nx.node_connected_component(network, start)


def _split_classes(
    reduced: Graph,
    edge_ids: list[int],
    first: Bicolouring,
    make_selector: Callable[[Graph], BadSelector],
    colours: list[int],
    base: int,
):
    # blue-blue, blue-red, red-blue, red-red take colours base..base+3
    for side in Side:
        class_ids = [edge_ids[i] for i in first.edges_of(side)]
        class_graph = reduced.edge_subgraph(class_ids)
        second = balanced_bicolouring(class_graph, make_selector(class_graph))
        for i, e in enumerate(class_ids):
            colours[e] = base + 2 * side + second.side[i]


def _small_two(reduced: Graph) -> list[int]:
    colours = [0] * reduced.edge_count
    chosen, rest = _round_class(reduced, list(range(reduced.edge_count)), Fraction(1, 3))
    for e in chosen:
        colours[e] = 3

    split = balanced_bicolouring(reduced.edge_subgraph(rest), no_vertex)
    for i, e in enumerate(rest):
        colours[e] = 1 + split.side[i]
    return colours


def _small_three(reduced: Graph) -> tuple[list[int], int]:
    degrees = reduced.degrees
    colours = [0] * reduced.edge_count

    aside: list[int] = []
    main: list[int] = []
    for vertices, edges in edge_components(reduced, range(reduced.edge_count)):
        if len(edges) % 2 and all(degrees[v] == 14 for v in vertices):
            aside.extend(edges)
        else:
            main.extend(edges)
    aside.sort()
    main.sort()

    def six_regular_odd(vertices, edge_count, class_degree) -> bool:
        return edge_count % 2 == 1 and all(class_degree[v] == 6 for v in vertices)

    sub = reduced.edge_subgraph(main)
    first = eliminate_bad_components(sub, balanced_bicolouring(sub, no_vertex), six_regular_odd)
    _split_classes(
        reduced, main, first, lambda g: degree_selector(g.degrees, {8}), colours, base=1
    )

    sub = reduced.edge_subgraph(aside)
    _split_classes(
        reduced, aside, balanced_bicolouring(sub, any_vertex), lambda g: no_vertex, colours, base=1
    )
    return colours, len(aside)


def _small_four(reduced: Graph) -> list[int]:
    degrees = reduced.degrees
    colours = [0] * reduced.edge_count

    chosen, rest = _round_class(reduced, list(range(reduced.edge_count)), Fraction(1, 5))
    for e in chosen:
        colours[e] = 1

    def tight_odd(vertices, edge_count, class_degree) -> bool:
        return edge_count % 2 == 1 and all(
            (class_degree[v], degrees[v]) in {(10, 23), (8, 19)} for v in vertices
        )

    def second_selector(class_graph: Graph) -> BadSelector:
        def select(v: int) -> Optional[int]:
            return 0 if (class_graph.degrees[v], degrees[v]) in {(10, 27), (12, 31)} else None

        return select

    sub = reduced.edge_subgraph(rest)
    first = balanced_bicolouring(sub, degree_selector(sub.degrees, {18, 22}))
    first = eliminate_bad_components(sub, first, tight_odd)
    _split_classes(reduced, rest, first, second_selector, colours, base=2)
    return colours


def _run_small_k(graph: Graph, k: int) -> tuple[EdgeColouring, SchemeReport]:
    if k not in (2, 3, 4):
        raise PreconditionError(f"small-k scheme covers k in 2..4, got k = {k}")
    if graph.vertex_count == 0 or graph.min_degree < k * k:
        raise PreconditionError(f"minimum degree {graph.min_degree} is below k^2 = {k * k}")

    reduced, traces = reduce_to_sk(graph, k)
    report = SchemeReport(algorithm="small-k", k=k)
    report.stats = {
        "reduced_vertices": reduced.vertex_count,
        "reduced_edges": reduced.edge_count,
        "doublings": traces[-1].copies,
    }

    if k == 2:
        colours = _small_two(reduced)
    elif k == 3:
        colours, set_aside = _small_three(reduced)
        report.stats["set_aside_edges"] = set_aside
    else:
        colours = _small_four(reduced)

    on_reduced = EdgeColouring(colours=tuple(colours), colour_count=k + 1)
    if not check_majority(reduced, on_reduced, k).passed:
        raise InternalInvariantError("colouring of the reduced graph is invalid")

    return _finish(graph, k, pull_back_colouring(on_reduced, traces), report)


def colour_bipartite(graph: Graph, k: int) -> EdgeColouring:
    return _run_bipartite(graph, k)[0]


def colour_general_2k2(graph: Graph, k: int) -> EdgeColouring:
    return _run_general(graph, k)[0]


def colour_refined(graph: Graph, k: int) -> EdgeColouring:
    return _run_refined(graph, k)[0]


def colour_small_k(graph: Graph, k: int) -> EdgeColouring:
    return _run_small_k(graph, k)[0]


def colour_auto(
    graph: Graph, k: int, oracle_node_limit: Optional[int] = None
) -> tuple[Optional[EdgeColouring], SchemeReport]:
    """
    Runs the first scheme whose hypothesis holds: bipartite, small k, refined, general.
    Below every threshold the colouring is None, unless the exhaustive search is allowed
    (oracle_node_limit) and finds one.
    """

    bounds = thresholds(k)
    delta = graph.min_degree

    if delta >= bounds.bipartite and is_bipartite(graph).bipartite:
        return _run_bipartite(graph, k)
    if k <= 4 and delta >= bounds.conjectured:
        return _run_small_k(graph, k)
    if delta >= bounds.refined:
        return _run_refined(graph, k)
    if delta >= bounds.general:
        return _run_general(graph, k)

    report = SchemeReport(algorithm="none", k=k)
    logger.info("below guaranteed threshold", k=k, min_degree=delta)
    if oracle_node_limit is None:
        return None, report

    outcome = exhaustive_search(graph, k, k + 1, oracle_node_limit)
    report.oracle = OracleStats(
        nodes=outcome.node_count, limit_hit=outcome.limit_hit, result=outcome.result
    )
    if outcome.colouring is None:
        return None, report

    report.algorithm = "oracle"
    return _finish(graph, k, outcome.colouring, report)


def run_scheme(
    graph: Graph, k: int, algorithm: str = "auto", oracle_node_limit: Optional[int] = None
) -> tuple[Optional[EdgeColouring], SchemeReport]:
    if algorithm == "auto":
        return colour_auto(graph, k, oracle_node_limit)

    runners = {
        "bipartite": _run_bipartite,
        "general": _run_general,
        "refined": _run_refined,
        "small-k": _run_small_k,
    }
    if algorithm not in runners:
        raise ValueError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
    return runners[algorithm](graph, k)
