"""Restore tool — undo a shift plan on a list of paths."""

from __future__ import annotations

from typing import Annotated

from pydantic import BaseModel, Field

from src.convcode import read_sequences
from src.middleware import tool_logging
from src.reduction import ShiftPlan, restore_sequence, shift_sequence


class RestoreReport(BaseModel):
    direction: str
    shifts: list[int]
    paths: list[str]

    def to_text(self) -> str:
        return "".join(f"{p}\n" for p in self.paths)


@tool_logging
def restore_paths(
    paths: Annotated[str, Field(description="Sequences, one per line, e.g. '101 110 010 110'")],
    plan: Annotated[str, Field(description="Plan text, lines 'column j: forward l'")],
    inverse: Annotated[bool, Field(description="Apply the shift instead of restoring")] = False,
) -> RestoreReport:
    """Shift every listed path back to the original time alignment."""
    shift_plan = ShiftPlan.from_text(plan)
    move = shift_sequence if inverse else restore_sequence
    return RestoreReport(
        direction=str(shift_plan.direction),
        shifts=list(shift_plan.shifts),
        paths=[move(p, shift_plan).format() for p in read_sequences(paths)],
    )
