import argparse
import math
import sys
from pathlib import Path

from ..core.geometry import Dir2, Ray2
from ..models.construction import Source
from ..services.billiard import trace
from ..services.verify import ray_records
from .deps import add_config_argument, load_body, write_lines


def register(subparsers) -> None:
    parser = subparsers.add_parser("trace", help="trace a single ray and print it as a JSON line")
    add_config_argument(parser)
    parser.add_argument("--angle", type=float, required=True, help="direction in degrees, caller frame")
    parser.add_argument("--source", choices=[s.value for s in Source], default="A2")
    parser.add_argument("--out", type=Path, default=None, help="append the record to this JSONL file")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    _, body = load_body(args.config)
    source = Source(args.source)
    d = body.frame.apply_dir(Dir2.from_angle(math.radians(args.angle)))
    tr = trace(Ray2(body.source_point(source), d), body)
    line = ray_records(body, source, [d.angle], [tr])[0].model_dump_json()
    sys.stdout.write(line + "\n")
    if args.out is not None:
        write_lines(args.out, [line], append=True)
    return 0
