import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import structlog
from pydantic import ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from majority import config, harness
from majority.schemes import ALGORITHMS


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="majority_")

    debug: bool = False
    log_level: str = "INFO"
    node_limit: int = config.DEFAULT_NODE_LIMIT
    workers: int = config.DEFAULT_WORKERS

    @field_validator("log_level")
    @classmethod
    def check_log_level(cls, value: str) -> str:
        if value.upper() not in logging.getLevelNamesMapping():
            raise ValueError(f"unknown log level {value!r}")
        return value.upper()

    @field_validator("workers")
    @classmethod
    def check_workers(cls, value: int) -> int:
        if value < 1:
            raise ValueError("at least one worker is needed")
        return value


def configure_logging(level: str):
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=level.upper(),
        force=True,
    )

    structlog.configure(
        processors=[
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.EventRenamer("message"),
            structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
    )


def _k(value: str) -> int:
    k = int(value)
    if k < 2:
        raise argparse.ArgumentTypeError(f"k must be at least 2, got {k}")
    return k


def _non_negative(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {number}")
    return number


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")
    return number


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="majority",
        description="Construct and verify 1/k-majority (k+1)-edge-colourings. "
        "Log level, oracle node limit and sweep workers are read from MAJORITY_* env vars",
    )
    parser.set_defaults(debug=settings.debug)
    subparsers = parser.add_subparsers(dest="command")

    colour_parser = subparsers.add_parser(
        "colour",
        help="Colour a graph with the first applicable scheme",
    )
    colour_parser.add_argument("--k", type=_k, required=True)
    colour_parser.add_argument("--input", type=Path, required=True)
    colour_parser.add_argument("--output", type=Path, required=True)
    colour_parser.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    colour_parser.add_argument("--report", type=Path)
    colour_parser.add_argument(
        "--oracle",
        action="store_true",
        help="Fall back to exhaustive search when no scheme applies",
    )
    colour_parser.add_argument("--node-limit", type=_non_negative, default=settings.node_limit)
    colour_parser.set_defaults(func=harness.run_colour)

    verify_parser = subparsers.add_parser(
        "verify",
        help="Check a colouring against the majority caps",
    )
    verify_parser.add_argument("--k", type=_k, required=True)
    verify_parser.add_argument("--graph", type=Path, required=True)
    verify_parser.add_argument("--colouring", type=Path, required=True)
    verify_parser.add_argument("--json", action="store_true")
    verify_parser.set_defaults(func=harness.run_verify)

    construct_parser = subparsers.add_parser(
        "construct",
        help="Write a lower-bound or random graph",
    )
    construct_parser.add_argument(
        "--kind", choices=("bipartite-lower", "general-lower", "random"), required=True
    )
    construct_parser.add_argument("--k", type=_k, default=2)
    construct_parser.add_argument("--n", type=_non_negative)
    construct_parser.add_argument("--delta", type=_non_negative)
    construct_parser.add_argument("--bipartite", action="store_true")
    construct_parser.add_argument("--extra-edges", type=_non_negative, default=0)
    construct_parser.add_argument("--seed", type=_non_negative, default=0)
    construct_parser.add_argument("--output", type=Path)
    construct_parser.set_defaults(func=harness.run_construct)

    oracle_parser = subparsers.add_parser(
        "oracle",
        help="Search exhaustively for a colouring",
    )
    oracle_parser.add_argument("--k", type=_k, required=True)
    oracle_parser.add_argument("--graph", type=Path, required=True)
    oracle_parser.add_argument("--colours", type=_non_negative, help="Defaults to k + 1")
    oracle_parser.add_argument("--node-limit", type=_non_negative, default=settings.node_limit)
    oracle_parser.add_argument("--output", type=Path)
    oracle_parser.add_argument("--report", type=Path)
    oracle_parser.set_defaults(func=harness.run_oracle)

    sweep_parser = subparsers.add_parser(
        "sweep",
        help="Probe random graphs of a given minimum degree",
    )
    sweep_parser.add_argument("--k", type=_k, required=True)
    sweep_parser.add_argument("--delta", type=_non_negative, required=True)
    sweep_parser.add_argument("--n", type=_non_negative, required=True)
    sweep_parser.add_argument("--trials", type=_positive, required=True)
    sweep_parser.add_argument("--seed", type=_non_negative, required=True)
    sweep_parser.add_argument("--oracle-colours", type=_non_negative, help="Defaults to k + 1")
    sweep_parser.add_argument("--node-limit", type=_non_negative, default=settings.node_limit)
    sweep_parser.add_argument("--bipartite", action="store_true")
    sweep_parser.add_argument("--extra-edges", type=_non_negative, default=0)
    sweep_parser.add_argument("--output", type=Path)
    sweep_parser.set_defaults(func=harness.run_sweep, workers=settings.workers)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging("INFO")
    logger = structlog.stdlib.get_logger("main")

    try:
        settings = Settings.model_validate({})
    except ValidationError as err:
        for error in err.errors():
            logger.critical(
                f'validating field {".".join(map(str, error["loc"]))}: {error["msg"]}'
            )
        return harness.ExitCode.USAGE

    configure_logging(settings.log_level)

    parsed = build_parser(settings).parse_args(argv)
    if "func" not in parsed:
        print("Type -h")
        return harness.ExitCode.USAGE

    return harness.execute(parsed)


def main():
    sys.exit(int(run()))


if __name__ == "__main__":
    main()
