import argparse
from pathlib import Path
from typing import List

from pydantic import ValidationError

from ..core.errors import ConfigIOError, InvalidConfigFile
from ..core.geometry import Dir2, Point2, Ray2
from ..models.construction import Body2D
from ..models.trace import TraceResult
from ..schemas.render import SceneStyle
from ..schemas.report import RayRecord
from ..services.billiard import trace
from ..services.render import render_svg
from .deps import add_config_argument, load_body, write_text


def register(subparsers) -> None:
    parser = subparsers.add_parser("render", help="draw the body and optional traces as SVG")
    add_config_argument(parser)
    parser.add_argument("--traces", type=Path, default=None, help="JSONL ray records to overlay")
    parser.add_argument("-o", "--out", type=Path, required=True)
    parser.add_argument("--no-labels", action="store_true")
    parser.set_defaults(handler=run)


def load_traces(path: Path, body: Body2D) -> List[TraceResult]:
    """Re-trace every record of a JSONL file from its caller-frame origin and direction"""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigIOError(f"cannot read traces {path}: {exc.strerror}", path=str(path)) from exc
    traces = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = RayRecord.model_validate_json(line)
        except ValidationError as exc:
            raise InvalidConfigFile(f"{path}:{number} is not a ray record", path=str(path), line=number) from exc
        origin = body.frame.apply(Point2(*record.origin))
        d = body.frame.apply_dir(Dir2.of(Point2(*record.direction)))
        traces.append(trace(Ray2(origin, d), body))
    return traces


def run(args: argparse.Namespace) -> int:
    _, body = load_body(args.config)
    traces = load_traces(args.traces, body) if args.traces is not None else []
    write_text(args.out, render_svg(body, traces, SceneStyle(labels=not args.no_labels)))
    return 0
