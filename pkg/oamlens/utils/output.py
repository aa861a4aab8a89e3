"""
Deterministic CSV / JSON writers

No timestamps are written; the only metadata is the generator tag.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import click
import pandas as pd

from .. import __version__

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.12g"


def generator_tag() -> str:
    return f"oamlens {__version__}"


def render_json(payload: Dict[str, Any]) -> str:
    """JSON 文本，首个键为 generator"""
    document = {"generator": generator_tag(), **payload}
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def render_csv(frame: pd.DataFrame) -> str:
    """CSV 文本：UTF-8，表头，小数点为 .，无索引列"""
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def write_output(text: str, out: Optional[str]) -> None:
    """Write to the --out path, or to stdout when no path is given"""
    if out is None:
        click.echo(text, nl=False)
        return
    path = Path(out)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info(f"✅ Wrote {path}")


def sidecar_path(out: str, suffix: str = ".spec.json") -> Path:
    """profile.csv -> profile.spec.json"""
    path = Path(out)
    return path.with_name(path.stem + suffix)
