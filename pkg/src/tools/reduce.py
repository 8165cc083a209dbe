"""Reduce tools — plan and build reduced error and code trellises."""

from __future__ import annotations

from typing import Annotated

from pydantic import BaseModel, Field

from src.convcode import format_bits, parse_sequence
from src.errors import IndeterminateStateError, ParseError
from src.gf2poly import PolyMatrix
from src.middleware import canonical_guardrail, tool_logging
from src.synformer import StateLayout
from src.reduction import (
    CodeReduction,
    ErrorReduction,
    ShiftDirection,
    ShiftPlan,
    admissible_segments,
    map_state,
    plan_backward_reduction,
    plan_forward_reduction,
    reduce_code_trellis,
    reduce_error_trellis,
    restriction_label,
)


class StateMapRow(BaseModel):
    state: str
    reduced: str


class SegmentRow(BaseModel):
    state: str
    reduced_states: list[str]
    constraint: str


class ReductionReport(BaseModel):
    role: str
    direction: str
    shifts: list[int]
    plan_text: str
    source: str
    reduced_matrix: str
    delayed_matrix: str | None = None
    row_delays: list[int] = Field(default_factory=list)
    nu_before: int
    nu_after: int
    states_before: int
    states_after: int
    received: str | None = None
    shifted_received: str | None = None
    sigma_fin: str | None = None
    reduced_sigma_fin: str | None = None
    syndrome: str | None = None
    reduced_syndrome: str | None = None
    state_map: list[StateMapRow] = Field(default_factory=list)
    segments: list[SegmentRow] = Field(default_factory=list)

    @property
    def nu_line(self) -> str:
        return f"ν {self.nu_before}→{self.nu_after}"


def parse_backward_spec(spec: str) -> tuple[list[int], int]:
    """``2,3:2`` → 0-based columns [1, 2] and shift 2."""
    columns_text, sep, shift_text = spec.partition(":")
    try:
        columns = [int(c) - 1 for c in columns_text.split(",") if c.strip()]
        shift = int(shift_text) if sep else 1
    except ValueError as exc:
        raise ParseError(f"bad backward plan {spec!r}, expected e.g. '2,3:2'") from exc
    return columns, shift


def error_plan(parity_check: PolyMatrix, backward: str | None) -> ShiftPlan:
    if backward:
        columns, shift = parse_backward_spec(backward)
        return plan_backward_reduction(parity_check, columns, shift)
    return plan_forward_reduction(parity_check)


def error_report(plan: ShiftPlan, reduction: ErrorReduction | None = None) -> ReductionReport:
    """Report for a parity-check plan; trellis fields are filled when *reduction* is given."""
    nu_before, nu_after = plan.nu_change()
    state_map: list[StateMapRow] = []
    segments: list[SegmentRow] = []
    if reduction is not None:
        all_segments = reduction.segments
    elif plan.direction is ShiftDirection.FORWARD:
        all_segments = {
            s: admissible_segments(s, plan) for s in StateLayout.for_matrix(plan.source).all_labels()
        }
    else:
        all_segments = {}
    for state, seg in all_segments.items():
        try:
            image = format_bits(map_state(state, plan))
        except IndeterminateStateError:
            image = "indeterminate"
        state_map.append(StateMapRow(state=format_bits(state), reduced=image))
        segments.append(
            SegmentRow(
                state=format_bits(state),
                reduced_states=[format_bits(s) for s in seg.reduced_states],
                constraint=seg.describe(),
            )
        )
    report = ReductionReport(
        role=str(plan.role),
        direction=str(plan.direction),
        shifts=list(plan.shifts),
        plan_text=plan.to_text(),
        source=plan.source.format(),
        reduced_matrix=plan.reduced.format(),
        delayed_matrix=plan.delayed.format() if plan.delayed is not None else None,
        row_delays=list(plan.row_delays),
        nu_before=nu_before,
        nu_after=nu_after,
        states_before=2**nu_before,
        states_after=2**nu_after,
        state_map=state_map,
        segments=segments,
    )
    if reduction is None:
        return report
    return report.model_copy(
        update={
            "received": reduction.received.format(),
            "shifted_received": reduction.shifted.format(),
            "sigma_fin": format_bits(reduction.original.sigma_fin),
            "reduced_sigma_fin": format_bits(reduction.reduced.sigma_fin),
            "syndrome": reduction.original.syndrome.format(),
            "reduced_syndrome": reduction.reduced.syndrome.format(),
        }
    )


def code_report(reduction: CodeReduction) -> ReductionReport:
    plan = reduction.plan
    nu_before, nu_after = plan.nu_change()
    sections = sorted({b.section for bits in reduction.restrictions.values() for b in bits})
    state_map = [
        StateMapRow(state=format_bits(beta), reduced=format_bits(start))
        for beta, start in reduction.reduced_starts.items()
    ]
    segments = [
        SegmentRow(
            state=format_bits(beta),
            reduced_states=[format_bits(reduction.reduced_starts[beta])],
            constraint=", ".join(
                f"section {k} restricted to {restriction_label(reduction, beta, k)}" for k in sections
            ),
        )
        for beta in reduction.restrictions
    ]
    return ReductionReport(
        role=str(plan.role),
        direction=str(plan.direction),
        shifts=list(plan.shifts),
        plan_text=plan.to_text(),
        source=plan.source.format(),
        reduced_matrix=plan.reduced.format(),
        nu_before=nu_before,
        nu_after=nu_after,
        states_before=len(reduction.original.states[0]),
        states_after=len(reduction.reduced.states[0]),
        state_map=state_map,
        segments=segments,
    )


@tool_logging
@canonical_guardrail("parity_check")
def reduce_error_report(
    parity_check: Annotated[str, Field(description="Parity-check matrix H(D) text")],
    received: Annotated[str | None, Field(description="Received word z; only the plan is reported when omitted")] = None,
    backward: Annotated[str | None, Field(description="Backward plan 'columns:shift' (1-based), e.g. '2,3:2'; forward when omitted")] = None,
) -> ReductionReport:
    """Plan a reduction of H, build the reduced error trellis for z and map its states."""
    H = PolyMatrix.parse(parity_check)
    plan = error_plan(H, backward)
    if received is None:
        return error_report(plan)
    return error_report(plan, reduce_error_trellis(H, parse_sequence(received), plan))


@tool_logging
@canonical_guardrail("generator")
def reduce_code_report(
    generator: Annotated[str, Field(description="Generator matrix G(D) text")],
    length: Annotated[int, Field(description="Block length N", ge=1)],
) -> ReductionReport:
    """Shift code components of G to reduce its tail-biting code trellis."""
    return code_report(reduce_code_trellis(PolyMatrix.parse(generator), length))
