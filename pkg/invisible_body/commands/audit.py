import argparse

from ..services.verify import construction_audit
from .deps import add_config_argument, emit, load_body


def register(subparsers) -> None:
    parser = subparsers.add_parser("audit", help="check the construction invariants of the body")
    add_config_argument(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    _, body = load_body(args.config)
    report = construction_audit(body)
    emit(report)
    return 0 if report.passed else 1
