"""Main entry point for the stuq command line.

Subcommands: synth, train, run, sweep, plot-data and oracle. Exit codes
are 0 on success, 1 on configuration or validation errors and 2 when
training or sampling diverges.
"""

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from stuq import __version__
from stuq.core.enums import MethodTag, PlotKind
from stuq.core.errors import DivergenceError, StuqError
from stuq.handlers import CommandHandlers
from stuq.services.oracles import ORACLES

logger = logging.getLogger(__name__)


def configure_logging() -> None:
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        level=os.getenv("STUQ_LOG_LEVEL", "INFO").upper(),
        handlers=[logging.StreamHandler(sys.stdout)],
    )


def _experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="preset .env file")
    parser.add_argument("--seed", type=int, metavar="N", help="base seed")
    parser.add_argument("--method", choices=[t.value for t in MethodTag], metavar="TAG", help="UQ method tag")
    parser.add_argument("--rho", type=float, metavar="R", help="interval level: bounds target 1 - R coverage")
    parser.add_argument("--out", metavar="DIR", help="results directory")
    parser.add_argument("--samples", metavar="LIST", help="sweep sample counts, e.g. 5,25")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stuq", description="Uncertainty quantification for spatiotemporal forecasts")
    parser.add_argument("--version", action="version", version=f"stuq {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("synth", "generate a synthetic dataset"),
        ("train", "train and checkpoint a point model"),
        ("run", "run one UQ method end to end"),
        ("sweep", "MIS against Monte Carlo sample count"),
    ):
        _experiment_flags(commands.add_parser(name, help=help_text))

    plot = commands.add_parser("plot-data", help="emit plot-ready CSV from stored results")
    plot.add_argument("sources", nargs="+", help="run directories or sweep tables")
    plot.add_argument("--kind", required=True, choices=[k.value for k in PlotKind])
    plot.add_argument("--out", required=True, metavar="PATH", help="CSV file to write")
    plot.add_argument("--window", type=int, default=-1, help="test window for forecast bands")
    plot.add_argument("--feature", type=int, default=0, help="feature index for forecast bands")

    oracle = commands.add_parser("oracle", help="run the brute-force and numerical self-checks")
    oracle.add_argument("suites", nargs="*", metavar="SUITE", help=f"any of {', '.join(ORACLES)}")
    oracle.add_argument("--seed", type=int, default=0, metavar="N")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch the subcommand and map errors to exit codes."""
    load_dotenv()
    configure_logging()
    args = build_parser().parse_args(argv)
    handlers = CommandHandlers()
    dispatch = {
        "synth": handlers.synth,
        "train": handlers.train,
        "run": handlers.run,
        "sweep": handlers.sweep,
        "plot-data": handlers.plot_data,
        "oracle": handlers.oracle,
    }
    try:
        return dispatch[args.command](args)
    except DivergenceError as e:
        logger.error(f"Numerical divergence: {e}")
        return e.exit_code
    except StuqError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("Stopped by user")
        return 1


if __name__ == "__main__":
    sys.exit(main())
