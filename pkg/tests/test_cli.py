import hashlib
import json

import pandas as pd
import pytest

from conftest import complete, cycle
from majority.formats import load_colouring, load_graph, save_colouring, save_graph
from majority.graph import EdgeColouring, build_graph, check_majority
from majority.instances import general_lower_bound
from scripts.cli import run


@pytest.fixture
def c4_file(tmp_path):
    path = tmp_path / "c4.g"
    save_graph(cycle(4), path)
    return path


def test_colour_small_graph(tmp_path, c4_file):
    output = tmp_path / "c4.col"
    report_path = tmp_path / "report.json"

    code = run(
        ["colour", "--k", "2", "--input", str(c4_file), "--output", str(output),
         "--report", str(report_path)]
    )

    assert code == 0
    graph = load_graph(c4_file)
    assert check_majority(graph, load_colouring(output, graph), 2).passed

    report = json.loads(report_path.read_text())
    assert report["schema_version"] == 1
    assert report["algorithm"] == "bipartite"
    assert report["verdict"]["pass"] is True
    assert report["inputs"][str(c4_file)] == hashlib.sha256(c4_file.read_bytes()).hexdigest()


def test_colour_with_scheme(tmp_path):
    path = tmp_path / "k9.g"
    save_graph(complete(9), path)
    report_path = tmp_path / "report.json"

    code = run(
        ["colour", "--k", "2", "--input", str(path), "--output", str(tmp_path / "k9.col"),
         "--algorithm", "general", "--report", str(report_path)]
    )

    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["params"]["alpha"] == ["3/8", "1/2"]


def test_colour_below_thresholds(tmp_path):
    path = tmp_path / "sparse.g"
    save_graph(build_graph(11, [(u, v) for u in range(11) for v in range(u + 1, 11)]), path)

    code = run(["colour", "--k", "5", "--input", str(path), "--output", str(tmp_path / "out")])

    assert code == 3
    assert not (tmp_path / "out").exists()


def test_colour_scheme_preconditions(tmp_path, c4_file):
    code = run(
        ["colour", "--k", "3", "--input", str(c4_file), "--output", str(tmp_path / "out"),
         "--algorithm", "bipartite"]
    )
    assert code == 3


def test_colour_searches_only_when_asked(tmp_path):
    path = tmp_path / "c5.g"
    save_graph(cycle(5), path)
    output = tmp_path / "c5.col"
    report_path = tmp_path / "report.json"

    assert run(["colour", "--k", "2", "--input", str(path), "--output", str(output)]) == 3
    assert not output.exists()

    code = run(
        ["colour", "--k", "2", "--input", str(path), "--output", str(output), "--oracle",
         "--report", str(report_path)]
    )

    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["algorithm"] == "oracle"
    assert report["oracle"]["limit_hit"] is False
    graph = load_graph(path)
    assert check_majority(graph, load_colouring(output, graph), 2).passed


def test_colour_small_graph_without_scheme(tmp_path, c4_file):
    code = run(["colour", "--k", "3", "--input", str(c4_file), "--output", str(tmp_path / "out")])
    assert code == 3
    assert not (tmp_path / "out").exists()


def test_colour_infeasible_graph(tmp_path):
    path = tmp_path / "lower.g"
    save_graph(general_lower_bound(2), path)
    args = ["colour", "--k", "2", "--input", str(path), "--output", str(tmp_path / "out")]

    assert run(args) == 3
    assert run(args + ["--oracle"]) == 1
    assert not (tmp_path / "out").exists()


def test_colour_malformed_graph(tmp_path, capsys):
    path = tmp_path / "bad.g"
    path.write_text("graph 3 2\n0 1\n1 1\n")

    code = run(["colour", "--k", "2", "--input", str(path), "--output", str(tmp_path / "out")])

    assert code == 2
    assert "line 3" in capsys.readouterr().err


def test_verify(tmp_path, c4_file, capsys):
    good = tmp_path / "good.col"
    save_colouring(EdgeColouring(colours=(1, 2, 1, 2), colour_count=3), good)

    assert run(["verify", "--k", "2", "--graph", str(c4_file), "--colouring", str(good)]) == 0
    assert capsys.readouterr().out.strip() == "pass"


def test_verify_star_fails(tmp_path, capsys):
    graph_path = tmp_path / "star.g"
    colouring_path = tmp_path / "star.col"
    save_graph(build_graph(4, [(0, 1), (0, 2), (0, 3)]), graph_path)
    save_colouring(EdgeColouring(colours=(1, 2, 3), colour_count=3), colouring_path)

    code = run(
        ["verify", "--k", "2", "--graph", str(graph_path), "--colouring", str(colouring_path),
         "--json"]
    )

    assert code == 1
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"]["pass"] is False
    assert report["verdict"]["witness"]["vertex"] == 1


def test_verify_wrong_edge_count(tmp_path, c4_file):
    short = tmp_path / "short.col"
    save_colouring(EdgeColouring(colours=(1, 2, 1), colour_count=3), short)

    assert run(["verify", "--k", "2", "--graph", str(c4_file), "--colouring", str(short)]) == 2


def test_missing_file(tmp_path):
    code = run(["verify", "--k", "2", "--graph", str(tmp_path / "none.g"),
                "--colouring", str(tmp_path / "none.col")])
    assert code == 2


def test_construct_and_oracle(tmp_path):
    graph_path = tmp_path / "lower.g"
    report_path = tmp_path / "oracle.json"

    assert run(["construct", "--kind", "general-lower", "--k", "2", "--output", str(graph_path)]) == 0
    graph = load_graph(graph_path)
    assert (graph.vertex_count, graph.edge_count) == (6, 10)

    code = run(["oracle", "--k", "2", "--graph", str(graph_path), "--report", str(report_path)])

    assert code == 1
    report = json.loads(report_path.read_text())
    assert report["oracle"]["limit_hit"] is False
    assert report["algorithm"] is None


def test_oracle_inconclusive(tmp_path):
    path = tmp_path / "k9.g"
    save_graph(complete(9), path)
    assert run(["oracle", "--k", "2", "--graph", str(path), "--node-limit", "3"]) == 3


def test_construct_random_is_deterministic(tmp_path):
    first, second = tmp_path / "a.g", tmp_path / "b.g"
    for path in (first, second):
        args = ["construct", "--kind", "random", "--n", "12", "--delta", "4", "--seed", "7"]
        assert run(args + ["--output", str(path)]) == 0
    assert first.read_bytes() == second.read_bytes()


def _sweep(tmp_path, name, *extra):
    output = tmp_path / name
    assert run(["sweep", "--output", str(output), *extra]) == 0
    assert output.read_text().startswith("# majority-sweep v1\n")
    return pd.read_csv(output, comment="#")


def test_sweep_at_small_k_threshold(tmp_path):
    args = ("--k", "2", "--delta", "4", "--n", "12", "--trials", "6", "--seed", "7")
    frame = _sweep(tmp_path, "first.csv", *args)

    assert list(frame["trial"]) == list(range(6))
    assert frame["pass"].all()
    assert set(frame["algorithm"]) <= {"small-k", "bipartite"}
    assert set(frame["oracle_result"]) == {"skipped"}

    replay = _sweep(tmp_path, "second.csv", *args)
    pd.testing.assert_frame_equal(
        frame.drop(columns="duration_ms"), replay.drop(columns="duration_ms")
    )


def test_sweep_falls_through_to_oracle(tmp_path):
    frame = _sweep(
        tmp_path, "oracle.csv",
        "--k", "5", "--delta", "25", "--n", "52", "--trials", "2", "--seed", "7",
        "--node-limit", "100",
    )

    assert set(frame["algorithm"]) == {"none"}
    assert set(frame["oracle_result"]) == {"inconclusive"}
    assert not frame["pass"].any()


def test_invalid_settings(monkeypatch, c4_file):
    monkeypatch.setenv("MAJORITY_WORKERS", "0")
    assert run(["verify", "--k", "2", "--graph", str(c4_file), "--colouring", "x"]) == 2


def test_usage_errors(capsys):
    assert run([]) == 2
    assert "Type -h" in capsys.readouterr().out

    with pytest.raises(SystemExit) as err:
        run(["colour", "--k", "1", "--input", "a", "--output", "b"])
    assert err.value.code == 2


@pytest.mark.parametrize("trials", ["0", "-3"])
def test_sweep_needs_a_trial(tmp_path, trials):
    with pytest.raises(SystemExit) as err:
        run(["sweep", "--k", "2", "--delta", "4", "--n", "12", "--trials", trials, "--seed", "7",
             "--output", str(tmp_path / "sweep.csv")])

    assert err.value.code == 2
    assert not (tmp_path / "sweep.csv").exists()
