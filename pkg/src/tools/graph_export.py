"""Graph export tool — write a trellis as DOT source."""

from __future__ import annotations

import logging
from pathlib import Path

from src.config import ensure_output_dir
from src.trellis import State, TailBitingTrellis, export_graph

logger = logging.getLogger(__name__)


def write_graph(
    trellis: TailBitingTrellis,
    path: str | Path | None = None,
    highlight: State | None = None,
    planar_tail: bool = False,
) -> Path:
    """Write the DOT export; a bare file name lands in the output directory."""
    target = Path(path) if path else Path(f"{trellis.kind}_trellis.dot")
    if not target.is_absolute() and target.parent == Path("."):
        target = ensure_output_dir() / target
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(export_graph(trellis, highlight=highlight, planar_tail=planar_tail))
    logger.info("[Tool] wrote %s trellis graph to %s", trellis.kind, target)
    return target
