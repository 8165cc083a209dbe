"""Build tools — tail-biting error and code trellises with optional export."""

from __future__ import annotations

from typing import Annotated

from pydantic import BaseModel, Field

from src.convcode import format_bits, parse_bits, parse_sequence
from src.gf2poly import PolyMatrix
from src.middleware import canonical_guardrail, tool_logging
from src.tools.graph_export import write_graph
from src.trellis import TailBitingTrellis, build_code_trellis, build_error_trellis, extract_subtrellis


class TrellisReport(BaseModel):
    kind: str
    sections: int
    states_per_section: list[int]
    branches_per_section: list[int]
    sigma_fin: str | None = None
    syndrome: str | None = None
    highlight: str | None = None
    highlighted_paths: list[str] = Field(default_factory=list)
    export_path: str | None = None


def _report(
    trellis: TailBitingTrellis,
    highlight: str | None,
    export_path: str | None,
    planar_tail: bool,
) -> TrellisReport:
    start = parse_bits(highlight) if highlight else None
    paths = [p.labels.format() for p in extract_subtrellis(trellis, start)] if start is not None else []
    written = None
    if export_path:
        written = str(write_graph(trellis, export_path, highlight=start, planar_tail=planar_tail))
    summary = trellis.summary()
    return TrellisReport(
        kind=str(trellis.kind),
        sections=trellis.length,
        states_per_section=[s.states for s in summary],
        branches_per_section=[s.branches for s in summary],
        sigma_fin=format_bits(trellis.sigma_fin) if trellis.sigma_fin is not None else None,
        syndrome=trellis.syndrome.format() if trellis.syndrome is not None else None,
        highlight=format_bits(start) if start is not None else None,
        highlighted_paths=paths,
        export_path=written,
    )


@tool_logging
@canonical_guardrail("parity_check")
def build_error_trellis_report(
    parity_check: Annotated[str, Field(description="Parity-check matrix H(D) text")],
    received: Annotated[str, Field(description="Received word z, e.g. '110 101 101 011'")],
    highlight: Annotated[str | None, Field(description="Start state whose subtrellis is listed and drawn bold, e.g. '(1,0)'")] = None,
    export_path: Annotated[str | None, Field(description="Where to write the DOT export")] = None,
    planar_tail: Annotated[bool, Field(description="Repeat section 1 after section N in the export")] = False,
) -> TrellisReport:
    """Run the two-pass syndrome computation and build the tail-biting error trellis."""
    trellis = build_error_trellis(PolyMatrix.parse(parity_check), parse_sequence(received))
    return _report(trellis, highlight, export_path, planar_tail)


@tool_logging
@canonical_guardrail("generator")
def build_code_trellis_report(
    generator: Annotated[str, Field(description="Generator matrix G(D) text")],
    length: Annotated[int, Field(description="Block length N in time units", ge=1)],
    highlight: Annotated[str | None, Field(description="Encoder state whose subtrellis is listed and drawn bold")] = None,
    export_path: Annotated[str | None, Field(description="Where to write the DOT export")] = None,
    planar_tail: Annotated[bool, Field(description="Repeat section 1 after section N in the export")] = False,
) -> TrellisReport:
    """Build the tail-biting code trellis of G over N sections."""
    trellis = build_code_trellis(PolyMatrix.parse(generator), length)
    return _report(trellis, highlight, export_path, planar_tail)
