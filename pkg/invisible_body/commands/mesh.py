import argparse
import io
from pathlib import Path

from ..models.revolve import Body3D
from ..services.revolve import revolve_mesh, write_obj
from .deps import add_config_argument, load_body, positive_int, write_text


def register(subparsers) -> None:
    parser = subparsers.add_parser("mesh", help="revolve the body about A1A2 and export OBJ")
    add_config_argument(parser)
    parser.add_argument("-o", "--out", type=Path, required=True)
    parser.add_argument("--ntheta", type=positive_int, default=128, help="angular steps per full turn")
    parser.add_argument("--narc", type=positive_int, default=32, help="profile steps per boundary piece")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    cfg, body = load_body(args.config)
    mesh = revolve_mesh(Body3D(body, cfg.revolved_range), args.ntheta, args.narc)
    buffer = io.StringIO()
    write_obj(mesh, buffer)
    write_text(args.out, buffer.getvalue())
    return 0
