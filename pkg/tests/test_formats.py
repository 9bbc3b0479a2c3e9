import pytest

from majority.errors import ColouringInputError, FormatError
from majority.formats import (
    dump_colouring,
    dump_graph,
    load_colouring,
    parse_colouring,
    parse_graph,
    save_colouring,
    save_graph,
)
from majority.graph import EdgeColouring

C4_TEXT = """\
# four-cycle
graph 4 4
0 1
1 2

2 3
3 0
"""


def test_parse_graph(c4):
    assert parse_graph(C4_TEXT) == c4


def test_dump_graph_with_comment(c4):
    text = dump_graph(c4, "four-cycle")
    assert text.splitlines()[:2] == ["# four-cycle", "graph 4 4"]
    assert parse_graph(text) == c4


@pytest.mark.parametrize(
    "text, line",
    [
        ("graph 3 1\n0 0\n", 2),
        ("graph 3 2\n0 1\n1 0\n", 3),
        ("graph 3 1\n0 x\n", 2),
        ("graph 3 1\n0 1 2\n", 2),
        ("# c\ngraph 3 1\n0 5\n", 3),
        ("graph 3 1\n0 1\n1 2\n", 3),
        ("graphs 3 1\n0 1\n", 1),
    ],
)
def test_graph_errors_carry_line(text, line):
    with pytest.raises(FormatError, match=f"^line {line}: ") as err:
        parse_graph(text)
    assert err.value.line == line


def test_graph_missing_edges():
    with pytest.raises(FormatError, match="announces 3 edges, found 1"):
        parse_graph("graph 3 3\n0 1\n")
    with pytest.raises(FormatError, match="missing"):
        parse_graph("# only a comment\n")


def test_colouring_text():
    colouring = parse_colouring("colouring 3 2\n2 1\n0 2\n1 2\n")
    assert colouring == EdgeColouring(colours=(2, 2, 1), colour_count=2)
    assert parse_colouring(dump_colouring(colouring)) == colouring


@pytest.mark.parametrize(
    "text, message",
    [
        ("colouring 2 3\n0 1\n0 2\n", "coloured twice"),
        ("colouring 2 3\n0 1\n2 1\n", "outside 0..1"),
        ("colouring 2 3\n0 1\n1 4\n", "outside 1..3"),
        ("colouring 2 3\n0 1\n", "no colour"),
        ("colouring 2 0\n", "positive"),
    ],
)
def test_colouring_errors(text, message):
    with pytest.raises(FormatError, match=message):
        parse_colouring(text)


def test_files_round_trip(tmp_path, k66):
    graph_path = tmp_path / "k66.g"
    colouring_path = tmp_path / "k66.col"
    colouring = EdgeColouring(colours=tuple(e % 3 + 1 for e in range(36)), colour_count=3)

    save_graph(k66, graph_path)
    save_colouring(colouring, colouring_path)

    assert parse_graph(graph_path.read_text()) == k66
    assert load_colouring(colouring_path, k66) == colouring


def test_colouring_length_mismatch(tmp_path, c4):
    path = tmp_path / "short.col"
    save_colouring(EdgeColouring(colours=(1, 2, 1), colour_count=3), path)
    with pytest.raises(ColouringInputError):
        load_colouring(path, c4)
