"""Tail-biting trellises — construction, subtrellises, path enumeration, export.

A trellis is stored circularly: ``states[k]`` for k = 0…N with
``states[0] == states[N]``, and ``sections[k-1]`` holding the branches of
section k. Error trellises carry every state at every time; pruning is a
display concern only.
"""

from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from enum import StrEnum

import graphviz
import numpy as np

from src.config import PATH_BUDGET
from src.convcode import (
    Bits,
    EncoderState,
    EncoderStateSpace,
    SymbolSequence,
    dual_state_of_encoder_state,
    encoder_step,
    format_bits,
    xor_bits,
)
from src.errors import BudgetExceeded, CanonicityError, ShapeError, TailBitingLengthError, UnknownStateError
from src.gf2poly import PolyMatrix, is_canonical
from src.synformer import StateLayout, section_maps, tailbiting_syndrome

logger = logging.getLogger(__name__)

State = Bits


class TrellisKind(StrEnum):
    CODE = "code"
    ERROR = "error"


@dataclass(frozen=True, order=True)
class Branch:
    source: State
    label: Bits
    target: State


@dataclass(frozen=True, order=True)
class TrellisPath:
    start: State
    labels: SymbolSequence
    states: tuple[State, ...]

    @property
    def is_tailbiting(self) -> bool:
        return self.states[0] == self.states[-1]


@dataclass(frozen=True)
class SectionSummary:
    section: int
    states: int
    branches: int


@dataclass(frozen=True)
class TailBitingTrellis:
    kind: TrellisKind
    matrix: PolyMatrix
    states: tuple[tuple[State, ...], ...]
    sections: tuple[tuple[Branch, ...], ...]
    width: int
    syndrome: SymbolSequence | None = None
    sigma_fin: State | None = None
    _outgoing: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.states) != len(self.sections) + 1:
            raise ShapeError("a trellis with N sections needs N+1 state sets")
        if set(self.states[0]) != set(self.states[-1]):
            raise ShapeError("tail-biting trellis must close: states[0] != states[N]")
        for k, branches in enumerate(self.sections, start=1):
            left, right = set(self.states[k - 1]), set(self.states[k])
            for b in branches:
                if b.source not in left or b.target not in right:
                    raise ShapeError(f"section {k} branch {b} leaves the state sets")
        outgoing: dict[tuple[int, State], list[Branch]] = defaultdict(list)
        for k, branches in enumerate(self.sections, start=1):
            for b in branches:
                outgoing[k, b.source].append(b)
        object.__setattr__(self, "_outgoing", dict(outgoing))

    @property
    def length(self) -> int:
        return len(self.sections)

    N = length

    @property
    def state_bits(self) -> int:
        return len(self.states[0][0]) if self.states[0] else 0

    def section(self, k: int) -> tuple[Branch, ...]:
        """Branches of section k (1-based)."""
        return self.sections[k - 1]

    def outgoing(self, k: int, state: State) -> list[Branch]:
        return self._outgoing.get((k, state), [])

    def rotate(self, shift: int) -> TailBitingTrellis:
        """Move the time origin: section k of the result is section ⟨k+shift⟩ here."""
        n = self.length
        order = [(k - 1 + shift) % n for k in range(1, n + 1)]
        sections = tuple(self.sections[i] for i in order)
        states = (self.states[order[0]], *(self.states[i + 1] for i in order))
        syndrome = self.syndrome.rotate(shift) if self.syndrome is not None else None
        return replace(self, states=states, sections=sections, syndrome=syndrome)

    def summary(self) -> list[SectionSummary]:
        return [
            SectionSummary(k, len(self.states[k - 1]), len(branches))
            for k, branches in enumerate(self.sections, start=1)
        ]

    def subtrellis(self, start: State) -> TailBitingTrellis:
        return subtrellis(self, start)


# ── Construction ───────────────────────────────────────────────────────


def _bit_vectors(width: int) -> list[Bits]:
    return [tuple(bits) for bits in itertools.product((0, 1), repeat=width)]


def _apply(matrix: np.ndarray, vector: Iterable[int]) -> Bits:
    v = np.asarray(tuple(vector), dtype=np.int64)
    if matrix.size == 0:
        return (0,) * matrix.shape[0]
    return tuple(int(b) for b in (matrix.astype(np.int64) @ v) % 2)


def build_error_trellis(H: PolyMatrix, z: SymbolSequence) -> TailBitingTrellis:
    """Error trellis of the received word z under the syndrome former of H^T."""
    report = is_canonical(H)
    if not report.canonical:
        raise CanonicityError("error trellis needs a canonical parity-check matrix", report.diagnostic)
    sigma_fin, syndrome = tailbiting_syndrome(H, z)
    layout = StateLayout.for_matrix(H)
    maps = section_maps(H)
    all_states = tuple(layout.all_labels())
    symbols = _bit_vectors(H.n_cols)

    # per-state syndrome contribution and successor for every symbol
    contribution = {s: _apply(maps.C, s) for s in all_states}
    label_syndrome = {e: _apply(maps.D, e) for e in symbols}
    successor = {
        (s, e): xor_bits(_apply(maps.A, s), _apply(maps.B, e)) for s in all_states for e in symbols
    }

    sections = []
    for k in range(1, z.length + 1):
        zeta = syndrome.at(k)
        branches = [
            Branch(s, e, successor[s, e])
            for s in all_states
            for e in symbols
            if xor_bits(contribution[s], label_syndrome[e]) == zeta
        ]
        sections.append(tuple(sorted(branches)))
    logger.debug(
        "[Trellis] error trellis: %d states, %d branches/section",
        len(all_states),
        len(sections[0]),
    )
    return TailBitingTrellis(
        kind=TrellisKind.ERROR,
        matrix=H,
        states=(all_states,) * (z.length + 1),
        sections=tuple(sections),
        width=H.n_cols,
        syndrome=syndrome,
        sigma_fin=sigma_fin.bits,
    )


def build_code_trellis(G: PolyMatrix, length: int) -> TailBitingTrellis:
    """Code trellis over every encoder state at every time."""
    space = EncoderStateSpace.for_generator(G)
    if length < max(space.memory, 1):
        raise TailBitingLengthError(length, space.memory, "encoder memory")
    all_states = tuple(space.labels())
    section = tuple(
        sorted(
            Branch(beta, y, nxt)
            for beta in all_states
            for u in _bit_vectors(G.n_rows)
            for nxt, y in [encoder_step(G, space, beta, u)]
        )
    )
    return TailBitingTrellis(
        kind=TrellisKind.CODE,
        matrix=G,
        states=(all_states,) * (length + 1),
        sections=(section,) * length,
        width=G.n_cols,
    )


# ── Paths ──────────────────────────────────────────────────────────────


def _reaching(t: TailBitingTrellis) -> list[dict[State, frozenset[State]]]:
    """reach[k][s] = end states at time N reachable from s at time k."""
    n = t.length
    reach: list[dict[State, frozenset[State]]] = [dict() for _ in range(n + 1)]
    reach[n] = {s: frozenset((s,)) for s in t.states[n]}
    for k in range(n, 0, -1):
        layer: dict[State, set[State]] = defaultdict(set)
        for b in t.section(k):
            layer[b.source] |= reach[k].get(b.target, frozenset())
        reach[k - 1] = {s: frozenset(layer.get(s, ())) for s in t.states[k - 1]}
    return reach


def count_paths(t: TailBitingTrellis, start: State) -> int:
    """Number of tail-biting paths through *start*."""
    counts = {start: 1}
    for k in range(1, t.length + 1):
        nxt: dict[State, int] = defaultdict(int)
        for s, c in counts.items():
            for b in t.outgoing(k, s):
                nxt[b.target] += c
        counts = nxt
    return counts.get(start, 0)


def enumerate_paths(
    t: TailBitingTrellis, start: State | None = None, budget: int | None = None
) -> list[TrellisPath]:
    """Tail-biting paths (start = end), sorted by start state then labels."""
    budget = PATH_BUDGET if budget is None else budget
    starts = list(t.states[0]) if start is None else [start]
    for s in starts:
        if s not in t.states[0]:
            raise UnknownStateError(f"state {format_bits(s)} is not a state at time 0")
    total = sum(count_paths(t, s) for s in starts)
    if total > budget:
        raise BudgetExceeded("tail-biting paths", total, budget)

    reach = _reaching(t)
    paths: list[TrellisPath] = []
    for s in sorted(starts):
        if s not in reach[0].get(s, frozenset()):
            continue
        labels: list[Bits] = []
        states: list[State] = [s]

        def walk(k: int, current: State) -> None:
            if k > t.length:
                paths.append(
                    TrellisPath(s, SymbolSequence(tuple(labels), t.width), tuple(states))
                )
                return
            for b in t.outgoing(k, current):
                if s not in reach[k].get(b.target, frozenset()):
                    continue
                labels.append(b.label)
                states.append(b.target)
                walk(k + 1, b.target)
                labels.pop()
                states.pop()

        walk(1, s)
    paths.sort()
    logger.debug("[Trellis] enumerated %d tail-biting paths", len(paths))
    return paths


def extract_subtrellis(t: TailBitingTrellis, start: State) -> list[TrellisPath]:
    """All tail-biting paths with start = end = *start*."""
    return enumerate_paths(t, start=start)


def subtrellis(t: TailBitingTrellis, start: State) -> TailBitingTrellis:
    """The trellis restricted to branches lying on a tail-biting path through *start*."""
    if start not in t.states[0]:
        raise UnknownStateError(f"state {format_bits(start)} is not a state at time 0")
    reach = _reaching(t)
    forward = [{start}]
    sections = []
    for k in range(1, t.length + 1):
        kept = tuple(
            b
            for b in t.section(k)
            if b.source in forward[-1] and start in reach[k].get(b.target, frozenset())
        )
        sections.append(kept)
        forward.append({b.target for b in kept})
    # forward[N] is {start} or empty, so closure holds
    states = [tuple(sorted(layer)) for layer in forward]
    if not sections[-1]:
        states = [() for _ in states]
        sections = [() for _ in sections]
    return replace(t, states=tuple(states), sections=tuple(sections))


def error_subtrellis_state_for(
    code_start: EncoderState, sigma_fin: State, H: PolyMatrix, G: PolyMatrix
) -> State:
    """Error-trellis start state σ_fin + β* matching the code subtrellis at β."""
    dual = dual_state_of_encoder_state(G, H, code_start)
    if len(dual) != len(sigma_fin):
        raise ShapeError(f"σ_fin has {len(sigma_fin)} bits but the dual state has {len(dual)}")
    return xor_bits(sigma_fin, dual)


# ── Export ─────────────────────────────────────────────────────────────


def _node(k: int, state: State) -> str:
    return f"t{k}_" + ("".join(str(b) for b in state) or "x")


def export_graph(
    t: TailBitingTrellis, highlight: State | None = None, planar_tail: bool = False
) -> str:
    """DOT source of the trellis, time running left to right.

    Branches of the subtrellis through *highlight* are drawn bold. With
    *planar_tail* section 1 is repeated after section N.
    """
    bold: set[tuple[int, Branch]] = set()
    if highlight is not None:
        sub = subtrellis(t, highlight)
        bold = {(k, b) for k, branches in enumerate(sub.sections, start=1) for b in branches}

    sections = list(enumerate(t.sections, start=1))
    states = list(t.states)
    if planar_tail and t.length:
        sections.append((t.length + 1, t.sections[0]))
        states.append(t.states[1])

    dot = graphviz.Digraph(name=f"{t.kind}_trellis")
    dot.attr(rankdir="LR", splines="line")
    dot.attr("node", shape="circle", fontsize="10")
    dot.attr("edge", fontsize="9")
    for k, layer in enumerate(states):
        with dot.subgraph(name=f"time_{k}") as c:
            c.attr(rank="same")
            for s in layer:
                c.node(_node(k, s), format_bits(s))
    for k, branches in sections:
        source_bold_k = k if k <= t.length else 1
        for b in branches:
            label = "".join(str(x) for x in b.label)
            attrs = {"style": "bold", "penwidth": "2.5"} if (source_bold_k, b) in bold else {}
            dot.edge(_node(k - 1, b.source), _node(k, b.target), label=label, **attrs)
    return dot.source
