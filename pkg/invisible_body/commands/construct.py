import argparse
from pathlib import Path

from ..services.construction import describe_body
from .deps import add_config_argument, emit, load_body


def register(subparsers) -> None:
    parser = subparsers.add_parser("construct", help="build the body and write its description")
    add_config_argument(parser)
    parser.add_argument("-o", "--out", type=Path, default=None, help="body JSON (default: stdout)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    _, body = load_body(args.config)
    emit(describe_body(body), args.out)
    return 0
