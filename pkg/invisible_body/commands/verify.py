import argparse
import logging
import time
from pathlib import Path
from typing import List

from ..models.construction import Source
from ..models.revolve import Body3D
from ..schemas.report import SweepReport, VerifyReport
from ..services.revolve import revolved_sweep
from ..services.verify import ray_records, summarize_sweep, sweep_traces
from .deps import add_config_argument, emit, load_body, positive_int, write_lines

logger = logging.getLogger(__name__)

SOURCES = {"A1": (Source.A1,), "A2": (Source.A2,), "both": (Source.A1, Source.A2)}


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="seeded invisibility sweep; exit 0 iff PASS")
    add_config_argument(parser)
    parser.add_argument("--source", choices=sorted(SOURCES), default="both")
    parser.add_argument("--n", type=positive_int, default=None, help="rays per source (default: config n_rays)")
    parser.add_argument("--seed", type=int, default=None, help="default: config seed")
    parser.add_argument("--rays-out", type=Path, default=None, help="per-ray JSONL records")
    parser.add_argument("--timing", action="store_true", help="record wall time in the report")
    parser.add_argument("--revolved", action="store_true", help="sweep 3D rays through the body of revolution")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    cfg, body = load_body(args.config)
    n_rays = args.n if args.n is not None else cfg.n_rays
    seed = args.seed if args.seed is not None else cfg.seed

    sweeps: List[SweepReport] = []
    records: List[str] = []
    for source in SOURCES[args.source]:
        started = time.perf_counter()
        if args.revolved:
            report = revolved_sweep(Body3D(body, cfg.revolved_range), source, n_rays, seed, workers=args.workers)
        else:
            angles, traces = sweep_traces(body, source, n_rays, seed, workers=args.workers)
            report = summarize_sweep(body, source, n_rays, seed, traces)
            if args.rays_out is not None:
                records.extend(r.model_dump_json() for r in ray_records(body, source, angles, traces))
        if args.timing:
            report = report.model_copy(update={"wall_time": time.perf_counter() - started})
        sweeps.append(report)

    if args.rays_out is not None:
        if args.revolved:
            logger.warning("--rays-out is ignored for revolved sweeps")
        else:
            write_lines(args.rays_out, records)

    verdict = VerifyReport(sweeps=sweeps, perturbation=cfg.perturbation, passed=all(s.passed for s in sweeps))
    emit(verdict)
    return 0 if verdict.passed else 1
