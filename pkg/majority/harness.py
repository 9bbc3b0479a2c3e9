import argparse
import hashlib
import io
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from enum import IntEnum
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import pandera as pa
import pandera.typing as pt
import pydantic
import structlog

from . import config
from .errors import (
    ColouringInputError,
    FormatError,
    GraphConstructionError,
    InternalInvariantError,
    PreconditionError,
    TraceMismatchError,
    WeightError,
)
from .formats import dump_graph, load_colouring, load_graph, save_colouring, save_graph
from .graph import check_majority
from .instances import (
    SearchOutcome,
    bipartite_lower_bound,
    exhaustive_search,
    general_lower_bound,
    random_min_degree_graph,
)
from .schemes import SchemeReport, Verdict, run_scheme

logger = structlog.stdlib.get_logger("harness")


class ExitCode(IntEnum):
    OK = 0
    FAILED = 1
    USAGE = 2
    PRECONDITION = 3
    INTERNAL = 4


class ReportParams(pydantic.BaseModel):
    n: Optional[int] = None
    m: Optional[int] = None
    alpha: list[str] = []


class OracleSummary(pydantic.BaseModel):
    nodes: int
    limit_hit: bool


class RunReport(pydantic.BaseModel):
    """
    JSON report of a single command run. Apart from duration_ms it depends only on
    the inputs and the seed.
    """

    model_config = pydantic.ConfigDict(populate_by_name=True)

    schema_version: int = config.REPORT_SCHEMA_VERSION
    command: str
    k: int
    algorithm: Optional[str] = None
    params: ReportParams = ReportParams()
    verdict: Optional[Verdict] = None
    oracle: Optional[OracleSummary] = None
    seed: Optional[int] = None
    duration_ms: float = 0.0
    inputs: dict[str, str] = {}

    @pydantic.model_validator(mode="after")
    def check_claims(self):
        if self.algorithm not in (None, "none") and (self.verdict is None or not self.verdict.passed):
            raise ValueError("a report naming a colouring algorithm must embed a passing verdict")
        return self

    @classmethod
    def from_scheme(cls, command: str, report: SchemeReport, **fields) -> "RunReport":
        return cls(
            command=command,
            k=report.k,
            algorithm=report.algorithm,
            params=ReportParams(n=report.n, m=report.m, alpha=report.alpha),
            verdict=report.verdict,
            oracle=None
            if report.oracle is None
            else OracleSummary(nodes=report.oracle.nodes, limit_hit=report.oracle.limit_hit),
            **fields,
        )

    def dump(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


class SweepFrame(pd.DataFrame):
    """
    One row per sweep trial, in trial order.
    """

    COLUMNS = [
        "trial",
        "n",
        "m",
        "delta_actual",
        "algorithm",
        "pass",
        "oracle_nodes",
        "oracle_result",
        "duration_ms",
    ]

    class Schema(pa.DataFrameModel):
        trial: pt.Series[int] = pa.Field(ge=0, unique=True)
        n: pt.Series[int] = pa.Field(ge=0)
        m: pt.Series[int] = pa.Field(ge=0)
        delta_actual: pt.Series[int] = pa.Field(ge=0)
        algorithm: pt.Series[str] = pa.Field(
            isin=["bipartite", "general", "refined", "small-k", "none"]
        )
        passed: pt.Series[bool] = pa.Field(alias="pass")
        oracle_nodes: pt.Series[int] = pa.Field(ge=0)
        oracle_result: pt.Series[str] = pa.Field(
            isin=["skipped", "found", "infeasible", "inconclusive"]
        )
        duration_ms: pt.Series[float] = pa.Field(ge=0)

    def __init__(self, *args, **kwargs):
        # Check to avoid creating NaN columns when casting an existing frame.
        if len(args) == 0 and "data" not in kwargs:
            kwargs["columns"] = SweepFrame.COLUMNS

        super().__init__(*args, **kwargs)

    def validate(self):
        SweepFrame.Schema.validate(self)

    def to_versioned_csv(self) -> str:
        buffer = io.StringIO()
        buffer.write(f"# majority-sweep v{config.SWEEP_SCHEMA_VERSION}\n")
        self.to_csv(buffer, index=False, columns=SweepFrame.COLUMNS)
        return buffer.getvalue()


def _digest(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _elapsed_ms(started: float) -> float:
    return round((time.perf_counter() - started) * 1000, 3)


def _write_report(report: RunReport, path: Optional[Path]):
    if path is not None:
        Path(path).write_text(report.dump() + "\n")


def run_colour(args: argparse.Namespace) -> ExitCode:
    started = time.perf_counter()
    graph = load_graph(args.input)

    node_limit = args.node_limit if args.oracle and args.algorithm == "auto" else None
    colouring, scheme = run_scheme(graph, args.k, args.algorithm, node_limit)
    report = RunReport.from_scheme(
        "colour",
        scheme,
        inputs={str(args.input): _digest(args.input)},
        duration_ms=_elapsed_ms(started),
    )
    _write_report(report, args.report)

    if colouring is None:
        if scheme.oracle is not None and scheme.oracle.result == "infeasible":
            logger.warning("no colouring exists", nodes=scheme.oracle.nodes)
            return ExitCode.FAILED
        if scheme.oracle is not None:
            logger.warning("search hit its node limit", nodes=scheme.oracle.nodes)
            return ExitCode.PRECONDITION
        logger.warning("no colouring scheme applies to the graph", min_degree=graph.min_degree)
        return ExitCode.PRECONDITION

    save_colouring(colouring, args.output)
    logger.info("colouring written", output=str(args.output), algorithm=scheme.algorithm)
    return ExitCode.OK


def run_verify(args: argparse.Namespace) -> ExitCode:
    started = time.perf_counter()
    graph = load_graph(args.graph)
    colouring = load_colouring(args.colouring, graph)
    verdict = check_majority(graph, colouring, args.k)

    if args.json:
        report = RunReport(
            command="verify",
            k=args.k,
            verdict=Verdict.model_validate(verdict.summary()),
            inputs={str(p): _digest(p) for p in (args.graph, args.colouring)},
            duration_ms=_elapsed_ms(started),
        )
        print(report.dump())
    elif verdict.passed:
        print("pass")
    else:
        w = verdict.witness
        print(f"fail: vertex {w.vertex} has {w.count} edges of colour {w.colour}, cap {w.cap}")

    return ExitCode.OK if verdict.passed else ExitCode.FAILED


def run_construct(args: argparse.Namespace) -> ExitCode:
    if args.kind == "bipartite-lower":
        graph = bipartite_lower_bound(args.k)
        comment = f"bipartite lower bound, k = {args.k}"
    elif args.kind == "general-lower":
        graph = general_lower_bound(args.k)
        comment = f"general lower bound, k = {args.k}"
    else:
        if args.n is None or args.delta is None:
            raise FormatError("random graphs need --n and --delta")
        graph = random_min_degree_graph(
            args.n, args.delta, args.bipartite, args.seed, args.extra_edges
        )
        comment = (
            f"random graph, n = {args.n}, delta = {args.delta}, "
            f"bipartite = {args.bipartite}, seed = {args.seed}"
        )

    if args.output is None:
        sys.stdout.write(dump_graph(graph, comment))
    else:
        save_graph(graph, args.output, comment)
    logger.info("graph constructed", kind=args.kind, vertices=graph.vertex_count, edges=graph.edge_count)
    return ExitCode.OK


def run_oracle(args: argparse.Namespace) -> ExitCode:
    started = time.perf_counter()
    graph = load_graph(args.graph)
    colours = args.colours or args.k + 1
    outcome = exhaustive_search(graph, args.k, colours, args.node_limit)

    report = RunReport(
        command="oracle",
        k=args.k,
        algorithm="oracle" if outcome.colouring is not None else None,
        verdict=None if outcome.colouring is None else Verdict(passed=True),
        oracle=OracleSummary(nodes=outcome.node_count, limit_hit=outcome.limit_hit),
        inputs={str(args.graph): _digest(args.graph)},
        duration_ms=_elapsed_ms(started),
    )
    _write_report(report, args.report)
    logger.info("search finished", result=outcome.result, nodes=outcome.node_count)

    if outcome.colouring is not None:
        if args.output is not None:
            save_colouring(outcome.colouring, args.output)
        return ExitCode.OK
    return ExitCode.FAILED if outcome.result == "infeasible" else ExitCode.PRECONDITION


def _sweep_trial(args: argparse.Namespace, trial: int, seed: int) -> dict:
    started = time.perf_counter()
    graph = random_min_degree_graph(args.n, args.delta, args.bipartite, seed, args.extra_edges)
    colouring, scheme = run_scheme(graph, args.k)

    outcome: Optional[SearchOutcome] = None
    if colouring is None:
        colours = args.oracle_colours or args.k + 1
        outcome = exhaustive_search(graph, args.k, colours, args.node_limit)

    return {
        "trial": trial,
        "n": graph.vertex_count,
        "m": graph.edge_count,
        "delta_actual": graph.min_degree,
        "algorithm": scheme.algorithm,
        "pass": colouring is not None or (outcome is not None and outcome.colouring is not None),
        "oracle_nodes": 0 if outcome is None else outcome.node_count,
        "oracle_result": "skipped" if outcome is None else outcome.result,
        "duration_ms": _elapsed_ms(started),
    }


def sweep(args: argparse.Namespace) -> SweepFrame:
    """
    Runs the trials on a thread pool; trial i uses the i-th seed spawned from --seed.
    """

    if args.trials < 1:
        raise FormatError(f"a sweep needs at least one trial, got {args.trials}")

    children = np.random.SeedSequence(args.seed).spawn(args.trials)
    seeds = [int(child.generate_state(1)[0]) for child in children]

    with ThreadPoolExecutor(
        max_workers=max(1, args.workers),
        thread_name_prefix="Trial",
    ) as executor:
        rows = list(executor.map(lambda i: _sweep_trial(args, i, seeds[i]), range(args.trials)))

    frame = SweepFrame(rows, columns=SweepFrame.COLUMNS)
    frame.validate()
    return frame


def run_sweep(args: argparse.Namespace) -> ExitCode:
    frame = sweep(args)
    text = frame.to_versioned_csv()
    if args.output is None:
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)

    logger.info(
        "sweep finished",
        trials=len(frame),
        passed=int(frame["pass"].sum()),
        oracle_runs=int((frame["oracle_result"] != "skipped").sum()),
    )
    return ExitCode.OK


def execute(args: argparse.Namespace) -> ExitCode:
    """
    Runs the selected command and maps library errors onto exit codes.
    """

    inputs = [
        str(getattr(args, name))
        for name in ("input", "graph", "colouring")
        if getattr(args, name, None) is not None
    ]
    log = logger.bind(command=args.command, k=getattr(args, "k", None), inputs=inputs)
    log.debug("command started")
    try:
        return args.func(args)
    except (
        FormatError,
        GraphConstructionError,
        ColouringInputError,
        WeightError,
        TraceMismatchError,
    ) as err:
        log.error("invalid input", error=str(err))
        return ExitCode.USAGE
    except OSError as err:
        log.error("file access failed", error=str(err))
        return ExitCode.USAGE
    except PreconditionError as err:
        log.warning("preconditions unmet", error=str(err))
        return ExitCode.PRECONDITION
    except InternalInvariantError as err:
        log.critical("internal invariant violated", error=str(err), exc_info=args.debug)
        return ExitCode.INTERNAL
