"""Trellis reduction by cyclically shifted subsequences.

Three plans:

* forward (parity-check side): column j of H is divided by D^{l_j}; error
  component j is delayed, ẽ^{(j)}_k = e^{(j)}_⟨k−l_j⟩.
* backward (parity-check side): columns are multiplied by D^l and the rows
  re-canonicalised; e′^{(j)}_k = e^{(j)}_⟨k+l⟩.
* code (generator side): column j of G is divided by D^{l_j}; code
  component j is advanced, ỹ^{(j)}_k = y^{(j)}_⟨k+l_j⟩.

A ``ShiftPlan.direction`` always describes how the *sequence* moves.
Columns are 0-based in the API and 1-based in the plan text format.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from src import gf2linalg
from src.convcode import (
    Bits,
    EncoderState,
    EncoderStateSpace,
    SymbolSequence,
    check_duality,
    format_bits,
)
from src.errors import (
    CanonicityError,
    DualityError,
    IndeterminateStateError,
    InconsistentStateError,
    ParseError,
    PlanError,
    ShapeError,
    UnknownStateError,
)
from src.gf2poly import (
    PolyMatrix,
    column_monomial_factor,
    expand,
    is_canonical,
    overall_constraint_length,
    reduce_rows_to_canonical,
)
from src.synformer import StateLayout, SyndromeFormerState
from src.trellis import (
    State,
    TailBitingTrellis,
    TrellisPath,
    build_code_trellis,
    build_error_trellis,
    enumerate_paths,
    extract_subtrellis,
)

logger = logging.getLogger(__name__)


class ShiftDirection(StrEnum):
    FORWARD = "forward"
    BACKWARD = "backward"


class MatrixRole(StrEnum):
    PARITY_CHECK = "parity-check"
    GENERATOR = "generator"


# ── ShiftPlan ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ShiftPlan:
    direction: ShiftDirection
    shifts: tuple[int, ...]
    source: PolyMatrix | None = None
    reduced: PolyMatrix | None = None
    role: MatrixRole = MatrixRole.PARITY_CHECK
    delayed: PolyMatrix | None = None
    row_delays: tuple[int, ...] = ()
    row_operations: PolyMatrix | None = None

    def __post_init__(self) -> None:
        if any(l < 0 for l in self.shifts):
            raise PlanError("inconsistent", f"negative shift in {self.shifts}")

    @property
    def width(self) -> int:
        return len(self.shifts)

    @property
    def max_shift(self) -> int:
        return max(self.shifts, default=0)

    @property
    def is_empty(self) -> bool:
        return not any(self.shifts)

    @property
    def shifted_columns(self) -> list[int]:
        return [j for j, l in enumerate(self.shifts) if l]

    def nu_change(self) -> tuple[int, int]:
        if self.source is None or self.reduced is None:
            raise PlanError("inconsistent", "plan has no matrices attached")
        return overall_constraint_length(self.source), overall_constraint_length(self.reduced)

    def to_text(self) -> str:
        return "".join(
            f"column {j + 1}: {self.direction} {l}\n" for j, l in enumerate(self.shifts)
        )

    @classmethod
    def from_text(cls, text: str) -> ShiftPlan:
        """Parse ``column j: forward l`` lines. Omitted columns are unshifted."""
        entries: dict[int, int] = {}
        directions: set[str] = set()
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            head, _, tail = line.partition(":")
            words = head.split()
            spec = tail.split()
            if len(words) != 2 or words[0] != "column" or not words[1].isdigit() or len(spec) != 2:
                raise ParseError(f"expected 'column j: forward|backward l', got {line.strip()!r}", line_no)
            if spec[0] not in ("forward", "backward") or not spec[1].isdigit():
                raise ParseError(f"bad shift {tail.strip()!r}", line_no, len(head) + 2)
            j = int(words[1])
            if j < 1 or j in entries:
                raise ParseError(f"column {j} is out of range or repeated", line_no)
            entries[j] = int(spec[1])
            directions.add(spec[0])
        if not entries:
            raise ParseError("empty plan", 1, 1)
        if len(directions) > 1:
            raise PlanError("inconsistent", "a plan shifts all columns in the same direction")
        width = max(entries)
        shifts = tuple(entries.get(j, 0) for j in range(1, width + 1))
        return cls(ShiftDirection(directions.pop()), shifts)


# ── Plans ──────────────────────────────────────────────────────────────


def _require_canonical(m: PolyMatrix, what: str) -> None:
    report = is_canonical(m)
    if not report.canonical:
        raise PlanError("non-canonical", f"{what} is not canonical: {report.diagnostic}")


def _column_factors(m: PolyMatrix) -> list[int]:
    factors = []
    for j in range(m.n_cols):
        try:
            factors.append(column_monomial_factor(m, j))
        except ShapeError:
            factors.append(0)
    return factors


def _divide_columns(m: PolyMatrix, shifts: Sequence[int]) -> PolyMatrix:
    for j, l in enumerate(shifts):
        if l:
            m = m.divide_column(j, l)
    return m


def plan_forward_reduction(H: PolyMatrix) -> ShiftPlan:
    """Divide every column of H by its monomial factor."""
    _require_canonical(H, "H")
    shifts = tuple(_column_factors(H))
    if not any(shifts):
        raise PlanError("empty", "no column of H has a monomial factor")
    reduced = _divide_columns(H, shifts)
    _require_canonical(reduced, "the reduced matrix")
    nu, nu_reduced = overall_constraint_length(H), overall_constraint_length(reduced)
    if nu_reduced >= nu:
        raise PlanError("no-gain", f"ν would go {nu}→{nu_reduced}")
    logger.info("[Reduction] forward plan l=%s, ν %d→%d", shifts, nu, nu_reduced)
    return ShiftPlan(ShiftDirection.FORWARD, shifts, H, reduced)


def plan_backward_reduction(H: PolyMatrix, columns: Iterable[int], shift: int) -> ShiftPlan:
    """Multiply the given (0-based) columns by D^shift and re-canonicalise the rows."""
    _require_canonical(H, "H")
    columns = sorted(set(columns))
    if not columns or shift < 1:
        raise PlanError("empty", "a backward plan needs at least one column and a shift >= 1")
    if columns[0] < 0 or columns[-1] >= H.n_cols:
        raise PlanError("inconsistent", f"columns {columns} out of range for {H.n_cols} columns")
    delayed = H
    for j in columns:
        delayed = delayed.multiply_column(j, shift)
    try:
        canon = reduce_rows_to_canonical(delayed)
    except CanonicityError as exc:
        raise PlanError("non-canonical", str(exc)) from exc
    shifts = tuple(shift if j in columns else 0 for j in range(H.n_cols))
    logger.info(
        "[Reduction] backward plan l=%s, row delays %s, ν %d→%d",
        shifts,
        canon.row_delays,
        overall_constraint_length(H),
        overall_constraint_length(canon.matrix),
    )
    return ShiftPlan(
        ShiftDirection.BACKWARD,
        shifts,
        H,
        canon.matrix,
        delayed=delayed,
        row_delays=canon.row_delays,
        row_operations=canon.row_operations,
    )


def plan_code_reduction(G: PolyMatrix) -> ShiftPlan:
    """Smallest per-column shifts of G that reach the least overall constraint length."""
    _require_canonical(G, "G")
    factors = _column_factors(G)
    if not any(factors):
        raise PlanError("empty", "no column of G has a monomial factor")
    nu = overall_constraint_length(G)
    best: tuple[tuple[int, int, tuple[int, ...]], PolyMatrix] | None = None
    for shifts in itertools.product(*(range(f + 1) for f in factors)):
        if not any(shifts):
            continue
        candidate = _divide_columns(G, shifts)
        if not is_canonical(candidate).canonical:
            continue
        key = (overall_constraint_length(candidate), sum(shifts), shifts)
        if best is None or key < best[0]:
            best = (key, candidate)
    if best is None or best[0][0] >= nu:
        reached = best[0][0] if best else nu
        raise PlanError("no-gain", f"ν would go {nu}→{reached}")
    (nu_reduced, _, shifts), reduced = best
    logger.info("[Reduction] code plan l=%s, ν %d→%d", shifts, nu, nu_reduced)
    return ShiftPlan(ShiftDirection.BACKWARD, shifts, G, reduced, role=MatrixRole.GENERATOR)


# ── Sequence shifts ────────────────────────────────────────────────────


def _move(x: SymbolSequence, offsets: Sequence[int]) -> SymbolSequence:
    """Result component j at time k is x component j at time ⟨k+offsets[j]⟩."""
    if x.width != len(offsets):
        raise ShapeError(f"sequence width {x.width} does not match plan width {len(offsets)}")
    return SymbolSequence(
        tuple(
            tuple(x.at(k + offsets[j])[j] for j in range(x.width)) for k in range(1, x.length + 1)
        ),
        x.width,
    )


def shift_sequence(x: SymbolSequence, plan: ShiftPlan) -> SymbolSequence:
    sign = -1 if plan.direction is ShiftDirection.FORWARD else 1
    return _move(x, [sign * l for l in plan.shifts])


def restore_sequence(x: SymbolSequence, plan: ShiftPlan) -> SymbolSequence:
    sign = 1 if plan.direction is ShiftDirection.FORWARD else -1
    return _move(x, [sign * l for l in plan.shifts])


def align_syndrome(syndrome: SymbolSequence, plan: ShiftPlan) -> SymbolSequence:
    """The original run's ζ expressed as the reduced run's syndrome."""
    if plan.direction is ShiftDirection.FORWARD or plan.row_operations is None:
        return syndrome
    U = plan.row_operations
    out = []
    for k in range(1, syndrome.length + 1):
        bits = []
        for q in range(U.n_rows):
            acc = 0
            for r in range(U.n_cols):
                for i in range(U[q, r].bits.bit_length()):
                    if U[q, r].coefficient(i):
                        acc ^= syndrome.at(k + plan.row_delays[q] - i)[r]
            bits.append(acc)
        out.append(tuple(bits))
    return SymbolSequence(tuple(out), syndrome.width)


# ── Window equations and the state map ─────────────────────────────────


@dataclass(frozen=True, eq=False)
class _WindowSystem:
    """σ_N = A·x over x = (e^{(j)}_{N−s}) indexed s·n + j, and σ̃_N = P·σ_N + Q·x_tail."""

    A: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    tail: tuple[tuple[int, int, int], ...]  # (column j, section t, variable index)
    reduced_layout: StateLayout

    @property
    def tail_indices(self) -> list[int]:
        return [v for _, _, v in self.tail]


def _window_system(plan: ShiftPlan) -> _WindowSystem:
    if plan.role is not MatrixRole.PARITY_CHECK or plan.source is None or plan.reduced is None:
        raise PlanError("inconsistent", "the state map needs a parity-check plan with matrices")
    if plan.direction is not ShiftDirection.FORWARD:
        raise PlanError("backward-only", "state maps and admissible segments apply to forward plans")
    H = plan.source
    layout = StateLayout.for_matrix(H)
    reduced_layout = StateLayout.for_matrix(plan.reduced)
    coefficients = expand(H)
    n, memory = H.n_cols, layout.memory

    A = np.zeros((layout.size, n * memory), dtype=np.uint8)
    for r, (p, q) in enumerate(layout.slots):
        for s in range(memory - p + 1):
            A[r, s * n : (s + 1) * n] = coefficients[p + s][q]
    tail = tuple(
        (j, t, (plan.shifts[j] - t) * n + j)
        for j in range(n)
        for t in range(1, plan.shifts[j] + 1)
    )
    row_of = {slot: r for r, slot in enumerate(layout.slots)}
    P = np.zeros((reduced_layout.size, layout.size), dtype=np.uint8)
    Q = np.zeros((reduced_layout.size, len(tail)), dtype=np.uint8)
    for r, slot in enumerate(reduced_layout.slots):
        if slot not in row_of:
            raise PlanError("inconsistent", f"reduced slot {slot} has no counterpart in H")
        P[r, row_of[slot]] = 1
        for i, (_, _, v) in enumerate(tail):
            Q[r, i] = A[row_of[slot], v]
    return _WindowSystem(A, P, Q, tail, reduced_layout)


def _state_bits(state: State | SyndromeFormerState) -> Bits:
    return state.bits if isinstance(state, SyndromeFormerState) else tuple(state)


def _mat_vec(M: np.ndarray, v: Sequence[int]) -> Bits:
    if M.shape[0] == 0:
        return ()
    if M.shape[1] == 0:
        return (0,) * M.shape[0]
    return tuple(int(b) for b in (M.astype(np.int64) @ np.asarray(v, dtype=np.int64)) % 2)


@dataclass(frozen=True)
class SegmentBit:
    """Forced value of component ``column`` (0-based) at section ``section``; None if free."""

    column: int
    section: int
    bit: int | None


@dataclass(frozen=True)
class AdmissibleSegments:
    state: State
    forced: tuple[SegmentBit, ...]
    assignments: tuple[tuple[Bits, State], ...]  # (tail bits in ``forced`` order, reduced start)

    @property
    def determinate(self) -> bool:
        return all(b.bit is not None for b in self.forced)

    @property
    def reduced_states(self) -> tuple[State, ...]:
        return tuple(sorted({s for _, s in self.assignments}))

    def describe(self) -> str:
        if not self.forced:
            return "no constraint"
        return ", ".join(
            f"section {b.section} component {b.column + 1} = {'?' if b.bit is None else b.bit}"
            for b in self.forced
        )


def _check_source(plan: ShiftPlan, H: PolyMatrix | None) -> None:
    if H is not None and plan.source is not None and H != plan.source:
        raise PlanError("inconsistent", "plan was made for a different parity-check matrix")


def admissible_segments(
    state: State | SyndromeFormerState, plan: ShiftPlan, H: PolyMatrix | None = None
) -> AdmissibleSegments:
    """Tail bits e^{(j)}_{N−l_j+t}, t = 1…l_j, pinned down by the final state σ_N."""
    _check_source(plan, H)
    system = _window_system(plan)
    sigma = _state_bits(state)
    if len(sigma) != system.A.shape[0]:
        raise UnknownStateError(f"state {format_bits(sigma)} has the wrong number of bits")
    particular = gf2linalg.solve(system.A, sigma)
    if particular is None:
        raise InconsistentStateError(f"state {format_bits(sigma)} is not reachable by any error window")
    tail_idx = system.tail_indices
    kernel = gf2linalg.nullspace(system.A)[:, tail_idx]
    base = particular[tail_idx]

    forced = tuple(
        SegmentBit(j, t, None if kernel[:, i].any() else int(base[i]))
        for i, (j, t, _) in enumerate(system.tail)
    )
    projected = _mat_vec(system.P, sigma)
    assignments = []
    for delta in gf2linalg.span(kernel):
        tail_bits = tuple(int(a) ^ int(b) for a, b in zip(base, delta))
        reduced = tuple(a ^ b for a, b in zip(projected, _mat_vec(system.Q, tail_bits)))
        assignments.append((tail_bits, reduced))
    assignments.sort()
    return AdmissibleSegments(sigma, forced, tuple(assignments))


def map_state(
    state: State | SyndromeFormerState, plan: ShiftPlan, H: PolyMatrix | None = None
) -> State:
    """σ_N ↦ σ̃_N, with the tail terms rewritten onto the reduced window."""
    segments = admissible_segments(state, plan, H)
    images = segments.reduced_states
    if len(images) != 1:
        raise IndeterminateStateError(
            f"state {format_bits(segments.state)} maps to {len(images)} reduced states"
        )
    return images[0]


def state_map(plan: ShiftPlan) -> dict[State, State]:
    """map_state over every state of the original trellis, in label order."""
    layout = StateLayout.for_matrix(plan.source)
    return {s: map_state(s, plan) for s in layout.all_labels()}


# ── Error-trellis reduction ────────────────────────────────────────────


@dataclass(frozen=True)
class Embedding:
    """One original subtrellis found inside the reduced trellis."""

    original_state: State
    reduced_states: tuple[State, ...]
    reduced_paths: tuple[TrellisPath, ...]
    restored: tuple[SymbolSequence, ...]
    outside: int = 0  # restored sequences not in the original subtrellis


@dataclass(frozen=True, eq=False)
class ErrorReduction:
    plan: ShiftPlan
    received: SymbolSequence
    shifted: SymbolSequence
    original: TailBitingTrellis
    reduced: TailBitingTrellis
    segments: dict[State, AdmissibleSegments] = field(default_factory=dict)

    @property
    def syndrome(self) -> SymbolSequence:
        return self.original.syndrome


def _check_window(length: int, plan: ShiftPlan) -> None:
    if 2 * plan.max_shift > length:
        raise PlanError("too-short", f"N={length} is shorter than twice the largest shift {plan.max_shift}")


def reduce_error_trellis(
    H: PolyMatrix, z: SymbolSequence, plan: ShiftPlan | None = None
) -> ErrorReduction:
    """Build the reduced error trellis for z and couple it to the original one."""
    plan = plan_forward_reduction(H) if plan is None else plan
    _check_source(plan, H)
    _check_window(z.length, plan)
    original = build_error_trellis(H, z)
    shifted = shift_sequence(z, plan)
    reduced = build_error_trellis(plan.reduced, shifted)
    expected = align_syndrome(original.syndrome, plan)
    if reduced.syndrome != expected:
        raise PlanError(
            "inconsistent",
            f"reduced syndrome {reduced.syndrome} differs from the aligned original {expected}",
        )
    segments: dict[State, AdmissibleSegments] = {}
    if plan.direction is ShiftDirection.FORWARD:
        segments = {s: admissible_segments(s, plan) for s in original.states[0]}
    logger.info(
        "[Reduction] reduced trellis: %d→%d states, ζ=%s",
        len(original.states[0]),
        len(reduced.states[0]),
        original.syndrome,
    )
    return ErrorReduction(plan, z, shifted, original, reduced, segments)


def _obeys(path: TrellisPath, constraints: Iterable[tuple[int, int, int]]) -> bool:
    return all(path.labels.at(t)[j] == bit for j, t, bit in constraints)


def embed_error_subtrellis(reduction: ErrorReduction, state: State) -> Embedding:
    """Admissible reduced paths for original start state σ, and their restorations."""
    if reduction.plan.direction is not ShiftDirection.FORWARD:
        raise PlanError("backward-only", "backward plans are checked by whole path-set restoration")
    if state not in reduction.segments:
        raise UnknownStateError(f"state {format_bits(state)} is not a state of the original trellis")
    segments = reduction.segments[state]
    paths: set[TrellisPath] = set()
    for tail_bits, reduced_state in segments.assignments:
        constraints = [(b.column, b.section, bit) for b, bit in zip(segments.forced, tail_bits)]
        paths.update(
            p for p in extract_subtrellis(reduction.reduced, reduced_state) if _obeys(p, constraints)
        )
    ordered = tuple(sorted(paths))
    restored = tuple(sorted(restore_sequence(p.labels, reduction.plan) for p in ordered))
    return Embedding(state, segments.reduced_states, ordered, restored)


def restored_paths(reduction: ErrorReduction | CodeReduction) -> list[SymbolSequence]:
    """Every tail-biting path of the reduced trellis, restored and sorted."""
    return sorted(restore_sequence(p.labels, reduction.plan) for p in enumerate_paths(reduction.reduced))


# ── Code-trellis reduction ─────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class CodeReduction:
    plan: ShiftPlan
    length: int
    original: TailBitingTrellis
    reduced: TailBitingTrellis
    restrictions: dict[EncoderState, tuple[SegmentBit, ...]]
    reduced_starts: dict[EncoderState, State]

    @property
    def generator(self) -> PolyMatrix:
        return self.plan.reduced


def _restriction(G: PolyMatrix, plan: ShiftPlan, length: int, beta: EncoderState) -> tuple[SegmentBit, ...]:
    """Forced labels ỹ^{(j)}_k = y^{(j)}_{k+l_j−N} for the last l_j sections."""
    space = EncoderStateSpace.for_generator(G)
    coefficients = expand(G)
    bits = []
    for j in plan.shifted_columns:
        for k in range(length - plan.shifts[j] + 1, length + 1):
            t = k + plan.shifts[j] - length  # original section 1…l_j
            acc = 0
            for row, m in enumerate(space.input_memories):
                past = space.history(beta, row)  # u_{1-m} … u_0
                for i in range(t, len(coefficients)):
                    # u_{t-i} with t-i <= 0 lives in β at index m-1+(t-i)
                    idx = m - 1 + t - i
                    if coefficients[i][row, j]:
                        if idx < 0:
                            raise PlanError("inconsistent", f"column {j + 1} needs inputs older than the state")
                        acc ^= past[idx]
            bits.append(SegmentBit(j, k, acc))
    return tuple(bits)


def _project_encoder_state(G: PolyMatrix, reduced: PolyMatrix, beta: EncoderState) -> State:
    space = EncoderStateSpace.for_generator(G)
    target = EncoderStateSpace.for_generator(reduced)
    bits: list[int] = []
    for row, m in enumerate(target.input_memories):
        held = space.history(beta, row)
        bits.extend(held[len(held) - m :] if m else ())
    return tuple(bits)


def reduce_code_trellis(
    G: PolyMatrix, length: int, plan: ShiftPlan | None = None
) -> CodeReduction:
    """Reduced code trellis on G̃ plus, per original start state, its forced final labels."""
    plan = plan_code_reduction(G) if plan is None else plan
    if plan.role is not MatrixRole.GENERATOR:
        raise PlanError("inconsistent", "code reduction needs a generator plan")
    _check_window(length, plan)
    original = build_code_trellis(G, length)
    reduced = build_code_trellis(plan.reduced, length)
    restrictions = {b: _restriction(G, plan, length, b) for b in original.states[0]}
    starts = {b: _project_encoder_state(G, plan.reduced, b) for b in original.states[0]}
    logger.info(
        "[Reduction] code trellis: %d→%d states", len(original.states[0]), len(reduced.states[0])
    )
    return CodeReduction(plan, length, original, reduced, restrictions, starts)


def _in_subtrellis(t: TailBitingTrellis, start: State, labels: SymbolSequence) -> bool:
    current = {start}
    for k in range(1, t.length + 1):
        current = {b.target for s in current for b in t.outgoing(k, s) if b.label == labels.at(k)}
        if not current:
            return False
    return start in current


def embed_code_subtrellis(reduction: CodeReduction, beta: EncoderState) -> Embedding:
    """Restricted reduced paths for encoder state β, restored to codewords of G."""
    if beta not in reduction.restrictions:
        raise UnknownStateError(f"state {format_bits(beta)} is not an encoder state")
    start = reduction.reduced_starts[beta]
    constraints = [(b.column, b.section, b.bit) for b in reduction.restrictions[beta]]
    paths = [p for p in extract_subtrellis(reduction.reduced, start) if _obeys(p, constraints)]
    restored = sorted({restore_sequence(p.labels, reduction.plan) for p in paths})
    outside = sum(not _in_subtrellis(reduction.original, beta, y) for y in restored)
    if outside:
        logger.warning(
            "[Reduction] restriction for %s is not exact: %d restored codewords outside the subtrellis",
            format_bits(beta),
            outside,
        )
    return Embedding(beta, (start,), tuple(sorted(paths)), tuple(restored), outside)


def restriction_label(reduction: CodeReduction, beta: EncoderState, section: int) -> str:
    """Label pattern forced at *section*, ``x`` for free components."""
    pattern = ["x"] * reduction.plan.width
    for b in reduction.restrictions[beta]:
        if b.section == section:
            pattern[b.column] = str(b.bit)
    return "".join(pattern)


# ── Joint reduction ────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class JointReduction:
    code: CodeReduction | None
    error: ErrorReduction | None
    notes: tuple[str, ...]


def joint_reduction(G: PolyMatrix, H: PolyMatrix, z: SymbolSequence) -> JointReduction:
    """Code- and error-side reductions of one dual pair, whichever are possible."""
    if not check_duality(G, H):
        raise DualityError("G(D) H^T(D) is not zero")
    notes: list[str] = []
    code = error = None
    try:
        code = reduce_code_trellis(G, z.length)
    except PlanError as exc:
        notes.append(f"code side: {exc}")
    try:
        error = reduce_error_trellis(H, z)
    except PlanError as exc:
        notes.append(f"error side: {exc}")
    return JointReduction(code, error, tuple(notes))
