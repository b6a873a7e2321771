import logging
import sys
from argparse import ArgumentParser, Namespace
from typing import Any, Dict, List, Optional

from fourier_mixing import __version__
from fourier_mixing.cli import run
from fourier_mixing.config import SUBCOMMANDS, RunConfig, read_config_file
from fourier_mixing.errors import MixingError

__all__ = ["main"]

# Namespace attributes that are not RunConfig fields
_PARSER_ONLY = {"log_level", "config", "tabloids", "tours"}


def _common_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    space = common.add_argument_group("space")
    space.add_argument(
        "--space", choices=["group", "tabloids", "tours"], help="Homogeneous space"
    )
    space.add_argument("--tabloids", metavar="SHAPE", help="Tabloids of a shape")
    space.add_argument("--tours", metavar="N", type=int, help="Tours through N cities")
    space.add_argument("--n", type=int, help="Degree of the symmetric group")

    walk = common.add_argument_group("walk")
    walk.add_argument(
        "--dist",
        dest="dists",
        action="append",
        help="Distribution spec: uniform, point:<perm>, uniform_class:<type>, "
        "lazy_transposition[:n[:laziness]] or file:<path>. Repeat for switched walks",
    )
    walk.add_argument(
        "--class-cycle", type=int, help="Uniform distribution on k-cycles"
    )
    walk.add_argument("--N", dest="steps", type=int, help="Number of walk steps")
    walk.add_argument("--sweep-N", dest="sweep", help="Inclusive range a:b of steps")
    walk.add_argument("--word", help="Comma separated 0-based switching letters")
    walk.add_argument("--start", type=int, help="Index of the initial state")

    sampling = common.add_argument_group("sampling")
    sampling.add_argument("--M", dest="replicas", type=int, help="Number of walks")
    sampling.add_argument("--seed", type=int, help="Random seed")
    sampling.add_argument("--epsilon", type=float, help="Target accuracy")
    sampling.add_argument("--eta", type=float, help="Failure probability")
    sampling.add_argument("--tv-bound", type=float, help="Known TV bound of the walk")
    sampling.add_argument("--beta", type=float, help="Annealing inverse temperature")
    sampling.add_argument("--matrix", help="CSV distance matrix for tours")

    analysis = common.add_argument_group("analysis")
    analysis.add_argument("--alpha", type=float, help="Bad-state TV threshold")
    analysis.add_argument("--tolerance", type=float, help="jsr interval width")
    analysis.add_argument("--depth", type=int, help="jsr product depth")
    analysis.add_argument(
        "--exhaustive-check",
        action="store_true",
        default=None,
        help="Add brute-force verification fields to the report",
    )

    common.add_argument("--output", help="Output file; stdout when absent")
    common.add_argument("--config", help="JSON config file; its keys override flags")
    return common


def parse_args(args) -> Namespace:
    parser = ArgumentParser()
    parser.add_argument("-v", "--version", action="version", version=__version__)
    parser.add_argument(
        "-l",
        "--log",
        dest="log_level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Set the logging level",
        default="WARNING",
    )
    common = _common_parser()
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name, parents=[common])
        if name == "verify-cert":
            sub.add_argument("certificate", help="Certificate JSON file")
            sub.add_argument("--matrices", required=True, help="Matrix set JSON file")
    args = parser.parse_args(args)

    # Convert the textual log level into the logging module's equivalent constant
    args.log_level = getattr(logging, args.log_level)

    return args


def config_from_args(args: Namespace) -> RunConfig:
    """Flags that were given, with the config file applied on top"""
    values: Dict[str, Any] = {
        k: v for k, v in vars(args).items() if k not in _PARSER_ONLY and v is not None
    }
    if args.tabloids is not None:
        values.setdefault("space", "tabloids")
        values["shape"] = args.tabloids
    if args.tours is not None:
        values.setdefault("space", "tours")
        values["n"] = args.tours
    if args.config is not None:
        values.update(read_config_file(args.config))
    return RunConfig.from_dict(values)


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(sys.argv[1:] if argv is None else argv)

    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s:%(levelname)s:%(name)s:%(message)s",
        datefmt="%m-%d %H:%M:%S",
    )

    try:
        return run(config_from_args(args))
    except (MixingError, ValueError, OSError):
        logging.exception(f"{args.subcommand} failed")
        return 2


# test with: python -m fourier_mixing
if __name__ == "__main__":
    sys.exit(main())
