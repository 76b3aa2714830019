import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .commands import audit, construct, lemma, mesh, render, trace, verify
from .commands.deps import positive_int
from .config import settings
from .core.errors import KernelError

logger = logging.getLogger(__name__)

COMMANDS = (construct, verify, lemma, trace, render, mesh, audit)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invisible-body",
        description=f"{settings.PROJECT_NAME} {settings.VERSION}",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--workers", type=positive_int, default=settings.WORKERS, help="process pool size for sweeps")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one subcommand and return its exit code"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format=settings.LOG_FORMAT, stream=sys.stderr)
    try:
        return args.handler(args)
    except KernelError as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io_error", "detail": str(exc)}) + "\n")
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
