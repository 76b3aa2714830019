import argparse
import logging
import sys
from pathlib import Path
from typing import Iterable, Optional, Tuple

from pydantic import BaseModel

from ..core.errors import ConfigIOError
from ..models.construction import Body2D
from ..schemas.config import ConfigFile, load_config
from ..services.construction import apply_perturbation, build_body

logger = logging.getLogger(__name__)


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def add_config_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-c", "--config", required=True, type=Path, help="JSON run config")


def load_body(path: Path) -> Tuple[ConfigFile, Body2D]:
    """Parse the config, build its body and apply its perturbation, if any"""
    cfg = load_config(path)
    body = build_body(cfg.to_params())
    if cfg.perturbation is not None:
        p = cfg.perturbation
        body = apply_perturbation(body, p.sequence, p.arc, p.factor)
    return cfg, body


def write_text(path: Path, text: str, append: bool = False) -> None:
    try:
        with open(path, "a" if append else "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigIOError(f"cannot write {path}: {exc.strerror}", path=str(path)) from exc
    logger.info("wrote %s", path)


def write_lines(path: Path, lines: Iterable[str], append: bool = False) -> None:
    write_text(path, "".join(line + "\n" for line in lines), append=append)


def emit(document: BaseModel, out: Optional[Path] = None) -> None:
    """Pretty JSON to a file, or to stdout when no path is given"""
    text = document.model_dump_json(indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        write_text(out, text)
