"""Syndrome former — observer-canonical realisation of H^T(D).

State slots σ^{(p)}_q for p = 1…M (delay) and q = 1…m (syndrome row):

    σ^{(p)}_k = Σ_{s=0}^{M-p} e_{k-s} H_{p+s}^T
    ζ_k       = σ^{(1)}_{k-1} + e_k H_0^T
    σ^{(p)}_k = σ^{(p+1)}_{k-1} + e_k H_p^T

Slot (p, q) is structurally zero when p exceeds the degree of row q. The
full M×m grid is kept in ``SyndromeFormerState``; the trellis layer works
with the compact ν-bit label (p-major, q-minor, masked slots dropped).
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from src.convcode import Bits, SymbolSequence, format_bits, parse_bits
from src.errors import InconsistentStateError, ParseError, ShapeError, TailBitingLengthError
from src.gf2poly import CoeffExpansion, PolyMatrix, expand, row_degrees

logger = logging.getLogger(__name__)


# ── Layout ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class StateLayout:
    """Which slots of the M×m grid are live, and their order in a compact label."""

    memory: int
    row_degrees: tuple[int, ...]

    @classmethod
    def for_matrix(cls, H: PolyMatrix) -> StateLayout:
        return cls(H.memory, tuple(row_degrees(H)))

    @property
    def n_rows(self) -> int:
        return len(self.row_degrees)

    @property
    def slots(self) -> tuple[tuple[int, int], ...]:
        """Live (p, q) pairs, p 1-based delay, q 0-based row."""
        return tuple(
            (p, q)
            for p in range(1, self.memory + 1)
            for q in range(self.n_rows)
            if p <= self.row_degrees[q]
        )

    @property
    def size(self) -> int:
        return len(self.slots)

    @property
    def mask(self) -> np.ndarray:
        """Boolean (M, m) grid, True where a slot is live."""
        grid = np.zeros((self.memory, self.n_rows), dtype=bool)
        for p, q in self.slots:
            grid[p - 1, q] = True
        return grid

    def compact(self, grid: np.ndarray) -> Bits:
        return tuple(int(grid[p - 1, q]) for p, q in self.slots)

    def expand(self, bits: Sequence[int]) -> np.ndarray:
        if len(bits) != self.size:
            raise ShapeError(f"state label has {len(bits)} bits, expected {self.size}")
        grid = np.zeros((self.memory, self.n_rows), dtype=np.uint8)
        for (p, q), b in zip(self.slots, bits):
            grid[p - 1, q] = b & 1
        return grid

    def all_labels(self) -> list[Bits]:
        return [tuple((v >> (self.size - 1 - i)) & 1 for i in range(self.size)) for v in range(1 << self.size)]

    def format_state(self, bits: Sequence[int]) -> str:
        return format_bits(bits)

    def parse_state(self, text: str) -> Bits:
        bits = parse_bits(text)
        if len(bits) != self.size:
            raise ParseError(f"state {text!r} has {len(bits)} bits, expected {self.size}")
        return bits


# ── State ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SyndromeFormerState:
    """σ_k as the full slot grid (rows p = 1…M, columns q = 1…m)."""

    layout: StateLayout
    grid: tuple[Bits, ...]

    def __post_init__(self) -> None:
        array = np.array(self.grid, dtype=np.uint8).reshape(self.layout.memory, self.layout.n_rows)
        if np.any(array[~self.layout.mask]):
            raise InconsistentStateError("a structurally zero slot is set")

    @classmethod
    def from_array(cls, layout: StateLayout, array: np.ndarray) -> SyndromeFormerState:
        array = np.asarray(array, dtype=np.uint8).reshape(layout.memory, layout.n_rows) % 2
        return cls(layout, tuple(tuple(int(b) for b in row) for row in array))

    @classmethod
    def from_bits(cls, layout: StateLayout, bits: Sequence[int]) -> SyndromeFormerState:
        return cls.from_array(layout, layout.expand(bits))

    @classmethod
    def zero(cls, layout: StateLayout) -> SyndromeFormerState:
        return cls.from_array(layout, np.zeros((layout.memory, layout.n_rows), dtype=np.uint8))

    def to_array(self) -> np.ndarray:
        return np.array(self.grid, dtype=np.uint8).reshape(self.layout.memory, self.layout.n_rows)

    @property
    def bits(self) -> Bits:
        return self.layout.compact(self.to_array())

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.grid)

    def __add__(self, other: SyndromeFormerState) -> SyndromeFormerState:
        return SyndromeFormerState.from_array(self.layout, self.to_array() ^ other.to_array())

    def __str__(self) -> str:
        return format_bits(self.bits)


def format_state(state: SyndromeFormerState) -> str:
    return format_bits(state.bits)


def parse_state(H: PolyMatrix, text: str) -> SyndromeFormerState:
    layout = StateLayout.for_matrix(H)
    return SyndromeFormerState.from_bits(layout, layout.parse_state(text))


# ── Pure operations ────────────────────────────────────────────────────


def _symbol(e: Sequence[int], width: int) -> np.ndarray:
    if len(e) != width:
        raise ShapeError(f"symbol has width {len(e)}, expected {width}")
    return np.asarray(e, dtype=np.int64)


def cyclic_window(seq: SymbolSequence, k: int, size: int) -> list[Bits]:
    """(e_⟨k-size+1⟩, …, e_⟨k⟩), oldest first."""
    return [seq.at(t) for t in range(k - size + 1, k + 1)]


def state_from_history(
    H: PolyMatrix, history: SymbolSequence | Sequence[Sequence[int]]
) -> SyndromeFormerState:
    """σ_k from the last M error symbols (oldest first)."""
    layout = StateLayout.for_matrix(H)
    coefficients = expand(H)
    symbols = list(history)
    if len(symbols) != layout.memory:
        raise ShapeError(f"history has {len(symbols)} symbols, expected M={layout.memory}")
    grid = np.zeros((layout.memory, layout.n_rows), dtype=np.int64)
    # symbols[-1 - s] is e_{k-s}
    for p in range(1, layout.memory + 1):
        for s in range(layout.memory - p + 1):
            e = _symbol(symbols[-1 - s], H.n_cols)
            grid[p - 1] += e @ coefficients[p + s].T.astype(np.int64)
    return SyndromeFormerState.from_array(layout, grid % 2)


def _step_arrays(
    coefficients: CoeffExpansion, grid: np.ndarray, e: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    memory = coefficients.memory
    syndrome = e @ coefficients[0].T.astype(np.int64)
    if memory:
        syndrome = syndrome + grid[0]
    nxt = np.zeros_like(grid, dtype=np.int64)
    if memory:
        nxt[:-1] = grid[1:]
        for p in range(1, memory + 1):
            nxt[p - 1] += e @ coefficients[p].T.astype(np.int64)
    return nxt % 2, syndrome % 2


def step(
    H: PolyMatrix, state: SyndromeFormerState, e_k: Sequence[int]
) -> tuple[SyndromeFormerState, Bits]:
    """One clock: (σ_{k-1}, e_k) → (σ_k, ζ_k)."""
    layout = StateLayout.for_matrix(H)
    if state.layout != layout:
        raise ShapeError("state layout does not match the parity-check matrix")
    nxt, syndrome = _step_arrays(
        expand(H), state.to_array().astype(np.int64), _symbol(e_k, H.n_cols)
    )
    return SyndromeFormerState.from_array(layout, nxt), tuple(int(b) for b in syndrome)


# ── Stateful machine ───────────────────────────────────────────────────


class SyndromeFormer:
    """Clocked syndrome former. One owner per instance during a run."""

    def __init__(self, H: PolyMatrix, initial: SyndromeFormerState | None = None):
        self.H = H
        self.layout = StateLayout.for_matrix(H)
        self._coefficients = expand(H)
        self._grid = np.zeros((self.layout.memory, self.layout.n_rows), dtype=np.int64)
        self.reset(initial)

    def reset(self, initial: SyndromeFormerState | None = None) -> None:
        if initial is None:
            self._grid[:] = 0
        else:
            if initial.layout != self.layout:
                raise ShapeError("initial state layout does not match the parity-check matrix")
            self._grid = initial.to_array().astype(np.int64)

    @property
    def state(self) -> SyndromeFormerState:
        return SyndromeFormerState.from_array(self.layout, self._grid)

    def step(self, e_k: Sequence[int]) -> Bits:
        self._grid, syndrome = _step_arrays(
            self._coefficients, self._grid, _symbol(e_k, self.H.n_cols)
        )
        return tuple(int(b) for b in syndrome)

    def run(self, seq: SymbolSequence) -> SymbolSequence:
        return SymbolSequence(tuple(self.step(e) for e in seq), self.H.n_rows)


class TailBitingSyndrome(NamedTuple):
    sigma_fin: SyndromeFormerState
    syndrome: SymbolSequence


def tailbiting_syndrome(H: PolyMatrix, z: SymbolSequence) -> TailBitingSyndrome:
    """Two passes: zero start → σ_fin; restart from σ_fin → ζ."""
    if z.width != H.n_cols:
        raise ShapeError(f"received word has width {z.width}, expected {H.n_cols}")
    if z.length < max(H.memory, 1):
        raise TailBitingLengthError(z.length, H.memory)
    machine = SyndromeFormer(H)
    machine.run(z)
    sigma_fin = machine.state
    machine.reset(sigma_fin)
    syndrome = machine.run(z)
    if machine.state != sigma_fin:
        raise InconsistentStateError(
            f"second pass ended in {machine.state}, expected σ_fin={sigma_fin}"
        )
    logger.debug("[Synformer] σ_fin=%s ζ=%s", sigma_fin, syndrome)
    return TailBitingSyndrome(sigma_fin, syndrome)


# ── Linear description ─────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class SectionMaps:
    """Compact-label matrices: σ' = A σ + B e, ζ = C σ + D e (column vectors)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


def section_maps(H: PolyMatrix) -> SectionMaps:
    layout = StateLayout.for_matrix(H)
    coefficients = expand(H)
    nu, n, m = layout.size, H.n_cols, H.n_rows
    A = np.zeros((nu, nu), dtype=np.uint8)
    B = np.zeros((nu, n), dtype=np.uint8)
    C = np.zeros((m, nu), dtype=np.uint8)
    zero_e = np.zeros(n, dtype=np.int64)
    for i in range(nu):
        unit = [0] * nu
        unit[i] = 1
        nxt, syndrome = _step_arrays(coefficients, layout.expand(unit).astype(np.int64), zero_e)
        A[:, i] = layout.compact(nxt)
        C[:, i] = syndrome
    zero_grid = np.zeros((layout.memory, layout.n_rows), dtype=np.int64)
    for j in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[j] = 1
        nxt, _ = _step_arrays(coefficients, zero_grid, e)
        B[:, j] = layout.compact(nxt)
    return SectionMaps(A, B, C, coefficients[0].copy())
