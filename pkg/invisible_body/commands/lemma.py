import argparse

from ..services.lemma import lemma_sweep
from .deps import emit, positive_int


def register(subparsers) -> None:
    parser = subparsers.add_parser("lemma", help="seeded checks of the collinearity lemma and the angle formula")
    parser.add_argument("--samples", type=positive_int, default=1000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--gammas", type=positive_int, default=10, help="F1-ray angles per (alpha, beta) sample")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    report = lemma_sweep(args.samples, args.seed, gamma_values=args.gammas)
    emit(report)
    return 0 if report.passed else 1
