"""
Plain-text graph and colouring formats.

Graph files hold optional `#` comment lines, a `graph <n> <m>` header and m lines `<u> <v>`
with 0-based vertex indices. Colouring files hold a `colouring <m> <c>` header and m lines
`<edge-index> <colour>` with 1-based colours, one per edge.
"""

from pathlib import Path
from typing import Iterator

import pydantic

from .errors import ColouringInputError, FormatError, GraphConstructionError
from .graph import EdgeColouring, Graph, build_graph


def _content_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, stripped.split()


def _integers(fields: list[str], count: int, line: int) -> list[int]:
    if len(fields) != count:
        raise FormatError(f"expected {count} fields, got {len(fields)}", line)
    try:
        return [int(field) for field in fields]
    except ValueError:
        raise FormatError(f"non-integer field in {' '.join(fields)!r}", line)


def _header(lines: Iterator[tuple[int, list[str]]], keyword: str) -> tuple[int, int, int]:
    try:
        line, fields = next(lines)
    except StopIteration:
        raise FormatError(f"missing '{keyword}' header")

    if fields[0] != keyword:
        raise FormatError(f"expected '{keyword}' header, got {fields[0]!r}", line)

    first, second = _integers(fields[1:], 2, line)
    if first < 0 or second < 0:
        raise FormatError("header counts must be non-negative", line)
    return line, first, second


def parse_graph(text: str) -> Graph:
    lines = _content_lines(text)
    header_line, vertex_count, edge_count = _header(lines, "graph")

    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    last_line = header_line
    for line, fields in lines:
        if len(pairs) == edge_count:
            raise FormatError(f"more than {edge_count} edge lines", line)

        u, v = _integers(fields, 2, line)
        # Checked per line so the diagnostic carries the offending line number.
        try:
            build_graph(vertex_count, [(u, v)])
        except GraphConstructionError as err:
            raise FormatError(str(err), line)

        key = (min(u, v), max(u, v))
        if key in seen:
            raise FormatError(f"edge ({u}, {v}) is a duplicate edge", line)
        seen.add(key)

        pairs.append((u, v))
        last_line = line

    if len(pairs) != edge_count:
        raise FormatError(f"header announces {edge_count} edges, found {len(pairs)}", last_line)

    try:
        return build_graph(vertex_count, pairs)
    except GraphConstructionError as err:
        raise FormatError(str(err))


def dump_graph(graph: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {row}" for row in comment.splitlines())
    lines.append(f"graph {graph.vertex_count} {graph.edge_count}")
    lines.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


def parse_colouring(text: str) -> EdgeColouring:
    lines = _content_lines(text)
    header_line, edge_count, colour_count = _header(lines, "colouring")
    if colour_count < 1:
        raise FormatError("colour count must be positive", header_line)

    colours: list[int | None] = [None] * edge_count
    for line, fields in lines:
        e, c = _integers(fields, 2, line)
        if not 0 <= e < edge_count:
            raise FormatError(f"edge index {e} outside 0..{edge_count - 1}", line)
        if colours[e] is not None:
            raise FormatError(f"edge {e} coloured twice", line)
        if not 1 <= c <= colour_count:
            raise FormatError(f"colour {c} outside 1..{colour_count}", line)
        colours[e] = c

    missing = [e for e, c in enumerate(colours) if c is None]
    if missing:
        raise FormatError(f"edges {missing[:5]} have no colour")

    try:
        return EdgeColouring(colours=tuple(colours), colour_count=colour_count)
    except pydantic.ValidationError as err:
        raise FormatError(err.errors()[0]["msg"])


def dump_colouring(colouring: EdgeColouring) -> str:
    lines = [f"colouring {len(colouring.colours)} {colouring.colour_count}"]
    lines.extend(f"{e} {c}" for e, c in enumerate(colouring.colours))
    return "\n".join(lines) + "\n"


def load_graph(path: Path) -> Graph:
    return parse_graph(Path(path).read_text())


def save_graph(graph: Graph, path: Path, comment: str | None = None):
    Path(path).write_text(dump_graph(graph, comment))


def load_colouring(path: Path, graph: Graph | None = None) -> EdgeColouring:
    """
    Reads a colouring file; when a graph is given, the colouring must cover exactly its edges.
    """

    colouring = parse_colouring(Path(path).read_text())
    if graph is not None and len(colouring.colours) != graph.edge_count:
        raise ColouringInputError(
            f"colouring covers {len(colouring.colours)} edges, graph has {graph.edge_count}"
        )
    return colouring


def save_colouring(colouring: EdgeColouring, path: Path):
    Path(path).write_text(dump_colouring(colouring))
