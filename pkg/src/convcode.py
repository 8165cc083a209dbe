"""Convolutional codes — symbol sequences, tail-biting encoding and dual states.

Time is 1-indexed (k = 1…N) and wraps cyclically: ⟨0⟩ = N, ⟨N+1⟩ = 1.
Symbols are tuples of bits; a sequence is written ``110 101 101 011``.

Encoder states follow the convention ``β_k = (u_{k-m+1}, …, u_{k-1}, u_k)``
per input row (m = row degree of G), i.e. they include the current symbol.
"""

from __future__ import annotations

import itertools
import logging
import re
from collections import defaultdict
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.config import ENUMERATION_BUDGET_BITS
from src.errors import BudgetExceeded, DualityError, ParseError, ShapeError, TailBitingLengthError
from src.gf2poly import PolyMatrix, expand, row_degrees

logger = logging.getLogger(__name__)

Bits = tuple[int, ...]
EncoderState = Bits


# ── Bit-tuple helpers ──────────────────────────────────────────────────


def format_bits(bits: Iterable[int]) -> str:
    """``(1,0)``-style label."""
    return "(" + ",".join(str(b) for b in bits) + ")"


def parse_bits(text: str) -> Bits:
    """Inverse of ``format_bits``; also accepts a bare bit string such as ``10``."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
        parts = [p.strip() for p in body.split(",")] if body.strip() else []
    else:
        parts = list(body)
    if any(p not in ("0", "1") for p in parts):
        raise ParseError(f"bad state label {text!r}")
    return tuple(int(p) for p in parts)


def cyclic_index(t: int, length: int) -> int:
    """⟨t⟩: t mod N mapped into 1…N."""
    return (t - 1) % length + 1


def xor_bits(a: Sequence[int], b: Sequence[int]) -> Bits:
    return tuple(x ^ y for x, y in zip(a, b, strict=True))


# ── SymbolSequence ─────────────────────────────────────────────────────


@dataclass(frozen=True, order=True)
class SymbolSequence:
    """Length-N sequence of width-n bit symbols, cyclically indexed from 1."""

    symbols: tuple[Bits, ...]
    width: int

    def __post_init__(self) -> None:
        for k, symbol in enumerate(self.symbols, start=1):
            if len(symbol) != self.width:
                raise ShapeError(f"symbol {k} has width {len(symbol)}, expected {self.width}")
            if any(b not in (0, 1) for b in symbol):
                raise ShapeError(f"symbol {k} is not a bit vector: {symbol}")

    @classmethod
    def of(cls, symbols: Iterable[Iterable[int]], width: int | None = None) -> SymbolSequence:
        rows = tuple(tuple(int(b) for b in s) for s in symbols)
        if width is None:
            if not rows:
                raise ShapeError("width is required for an empty sequence")
            width = len(rows[0])
        return cls(rows, width)

    @classmethod
    def zeros(cls, length: int, width: int) -> SymbolSequence:
        return cls(tuple((0,) * width for _ in range(length)), width)

    @classmethod
    def from_array(cls, array: np.ndarray) -> SymbolSequence:
        array = np.asarray(array, dtype=np.uint8) % 2
        return cls(tuple(tuple(int(b) for b in row) for row in array), int(array.shape[1]))

    @classmethod
    def from_int(cls, value: int, length: int, width: int) -> SymbolSequence:
        """Bit ``k*width + j`` of *value* is component j of symbol k+1."""
        return cls(
            tuple(
                tuple((value >> (k * width + j)) & 1 for j in range(width)) for k in range(length)
            ),
            width,
        )

    @classmethod
    def parse(cls, text: str, line: int | None = None) -> SymbolSequence:
        return parse_sequence(text, line=line)

    @property
    def length(self) -> int:
        return len(self.symbols)

    N = length

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[Bits]:
        return iter(self.symbols)

    def at(self, t: int) -> Bits:
        """Symbol at cyclic time ⟨t⟩."""
        return self.symbols[cyclic_index(t, self.length) - 1]

    def component(self, j: int) -> Bits:
        """The j-th (0-based) component subsequence."""
        return tuple(s[j] for s in self.symbols)

    def rotate(self, shift: int) -> SymbolSequence:
        """Re-origin time: the result's symbol k is this sequence's symbol ⟨k+shift⟩."""
        return SymbolSequence(tuple(self.at(k + shift) for k in range(1, self.length + 1)), self.width)

    def __add__(self, other: SymbolSequence) -> SymbolSequence:
        if (self.length, self.width) != (other.length, other.width):
            raise ShapeError(
                f"cannot add sequences of shape {self.length}x{self.width} "
                f"and {other.length}x{other.width}"
            )
        return SymbolSequence(
            tuple(xor_bits(a, b) for a, b in zip(self.symbols, other.symbols)), self.width
        )

    def to_array(self) -> np.ndarray:
        return np.array(self.symbols, dtype=np.uint8).reshape(self.length, self.width)

    def to_int(self) -> int:
        value = 0
        for k, symbol in enumerate(self.symbols):
            for j, b in enumerate(symbol):
                if b:
                    value |= 1 << (k * self.width + j)
        return value

    def is_zero(self) -> bool:
        return not any(any(s) for s in self.symbols)

    def format(self) -> str:
        return " ".join("".join(str(b) for b in s) for s in self.symbols)

    def __str__(self) -> str:
        return self.format()


def parse_sequence(text: str, line: int | None = None) -> SymbolSequence:
    """Parse ``110 101 101 011``; every symbol must have the same width."""
    symbols: list[Bits] = []
    width: int | None = None
    for match in re.finditer(r"\S+", text):
        token, column = match.group(), match.start() + 1
        if any(c not in "01" for c in token):
            raise ParseError(f"bad symbol {token!r}", line, column)
        if width is None:
            width = len(token)
        elif len(token) != width:
            raise ParseError(f"symbol {token!r} has width {len(token)}, expected {width}", line, column)
        symbols.append(tuple(int(c) for c in token))
    if width is None:
        raise ParseError("empty sequence", line, 1)
    return SymbolSequence(tuple(symbols), width)


def format_sequence(seq: SymbolSequence) -> str:
    return seq.format()


def read_sequences(source: str | Path) -> list[SymbolSequence]:
    """One sequence per line; blank lines and ``#`` comments are skipped.

    *source* is a path or the file text itself.
    """
    text = Path(source).read_text() if isinstance(source, Path) else source
    sequences = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        sequences.append(parse_sequence(line, line=line_no))
    widths = {s.width for s in sequences}
    if len(widths) > 1:
        raise ParseError(f"mixed symbol widths {sorted(widths)}")
    return sequences


# ── Encoder ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class EncoderStateSpace:
    """Per-input-row memories of a feedforward encoder and the labels they give."""

    input_memories: tuple[int, ...]

    @classmethod
    def for_generator(cls, G: PolyMatrix) -> EncoderStateSpace:
        return cls(tuple(row_degrees(G)))

    @property
    def size(self) -> int:
        return sum(self.input_memories)

    @property
    def memory(self) -> int:
        return max(self.input_memories, default=0)

    def labels(self) -> list[EncoderState]:
        return [tuple(bits) for bits in itertools.product((0, 1), repeat=self.size)]

    def offsets(self) -> list[int]:
        return list(itertools.accumulate((0, *self.input_memories[:-1])))

    def history(self, state: EncoderState, row: int) -> Bits:
        """Bits of input row *row* held by *state*, oldest first."""
        start = self.offsets()[row]
        return state[start : start + self.input_memories[row]]

    def state_at(self, u: SymbolSequence, k: int) -> EncoderState:
        """β_k of the cyclic information sequence *u*."""
        bits: list[int] = []
        for row, m in enumerate(self.input_memories):
            bits.extend(u.at(t)[row] for t in range(k - m + 1, k + 1))
        return tuple(bits)


def _check_length(length: int, memory: int, what: str = "memory length") -> None:
    if length < max(memory, 1):
        raise TailBitingLengthError(length, memory, what)


def encode_tailbiting(G: PolyMatrix, u: SymbolSequence) -> SymbolSequence:
    """y_k = Σ_i u_⟨k−i⟩ G_i, i.e. cyclic convolution over the block."""
    if u.width != G.n_rows:
        raise ShapeError(f"information width {u.width} does not match {G.n_rows} generator rows")
    _check_length(u.length, G.memory)
    U = u.to_array().astype(np.int64)
    Y = np.zeros((u.length, G.n_cols), dtype=np.int64)
    for i, Gi in enumerate(expand(G)):
        Y += np.roll(U, i, axis=0) @ Gi.astype(np.int64)
    return SymbolSequence.from_array(Y % 2)


def encoder_step(
    G: PolyMatrix, space: EncoderStateSpace, state: EncoderState, u_k: Sequence[int]
) -> tuple[EncoderState, Bits]:
    """One section: (β_{k-1}, u_k) → (β_k, y_k)."""
    coefficients = expand(G)
    y = np.zeros(G.n_cols, dtype=np.int64)
    next_state: list[int] = []
    for row, m in enumerate(space.input_memories):
        past = space.history(state, row)
        # window[i] = u_{k-i}, i = 0…m
        window = (u_k[row], *reversed(past))
        for i, bit in enumerate(window[: len(coefficients)]):
            if bit:
                y += coefficients[i][row]
        if m:
            next_state.extend((*past[1:], u_k[row]))
    return tuple(next_state), tuple(int(b) for b in y % 2)


def codeword_start_state(G: PolyMatrix, u: SymbolSequence) -> EncoderState:
    """β_0 = β_N of the tail-biting encoding of *u*."""
    return EncoderStateSpace.for_generator(G).state_at(u, u.length)


def _information_words(G: PolyMatrix, length: int, budget_bits: int | None) -> Iterator[SymbolSequence]:
    bits = G.n_rows * length
    budget = ENUMERATION_BUDGET_BITS if budget_bits is None else budget_bits
    if bits > budget:
        raise BudgetExceeded("information bits to enumerate", bits, budget)
    for value in range(1 << bits):
        yield SymbolSequence.from_int(value, length, G.n_rows)


def enumerate_tailbiting_codewords(
    G: PolyMatrix, length: int, budget_bits: int | None = None
) -> frozenset[SymbolSequence]:
    """All tail-biting codewords of length N."""
    _check_length(length, G.memory)
    codewords = frozenset(encode_tailbiting(G, u) for u in _information_words(G, length, budget_bits))
    logger.debug("[Convcode] %d tail-biting codewords at N=%d", len(codewords), length)
    return codewords


def group_by_start_state(
    G: PolyMatrix, length: int, budget_bits: int | None = None
) -> dict[EncoderState, list[SymbolSequence]]:
    """Codewords grouped by their common initial/final encoder state, each group sorted."""
    _check_length(length, G.memory)
    space = EncoderStateSpace.for_generator(G)
    groups: dict[EncoderState, set[SymbolSequence]] = defaultdict(set)
    for u in _information_words(G, length, budget_bits):
        groups[space.state_at(u, length)].add(encode_tailbiting(G, u))
    return {state: sorted(groups[state]) for state in sorted(groups)}


# ── Duality ────────────────────────────────────────────────────────────


def check_duality(G: PolyMatrix, H: PolyMatrix) -> bool:
    """True iff G(D) H^T(D) = 0."""
    if G.n_cols != H.n_cols:
        raise ShapeError(f"G has {G.n_cols} columns but H has {H.n_cols}")
    return (G @ H.transpose()).is_zero()


def dual_state(H: PolyMatrix, y_history: SymbolSequence | Sequence[Sequence[int]]):
    """β* for the last M code symbols (oldest first): the syndrome-former state they induce."""
    from src.synformer import state_from_history

    return state_from_history(H, y_history)


def dual_state_of_encoder_state(G: PolyMatrix, H: PolyMatrix, state: EncoderState) -> Bits:
    """Compact dual-state label for an encoder state.

    The y-history feeding the syndrome former is a linear function of past
    inputs; every input it depends on must be held by the encoder state.
    """
    from src.synformer import StateLayout, state_from_history

    space = EncoderStateSpace.for_generator(G)
    if len(state) != space.size:
        raise ShapeError(f"encoder state has {len(state)} bits, expected {space.size}")
    layout = StateLayout.for_matrix(H)
    h_memory = layout.memory
    depth = h_memory + G.memory  # inputs u_{k-t}, t = 0…depth-1
    if h_memory == 0:
        return ()

    def image(inputs: dict[tuple[int, int], int]) -> Bits:
        history = []
        for s in range(h_memory - 1, -1, -1):
            y = np.zeros(G.n_cols, dtype=np.int64)
            for i, Gi in enumerate(expand(G)):
                for row in range(G.n_rows):
                    if inputs.get((s + i, row)):
                        y += Gi[row]
            history.append(tuple(int(b) for b in y % 2))
        return state_from_history(H, history).bits

    total = (0,) * layout.size
    for row in range(G.n_rows):
        held = space.input_memories[row]
        past = space.history(state, row)
        for t in range(depth):
            column = image({(t, row): 1})
            if t >= held:
                if any(column):
                    raise DualityError(
                        f"dual state depends on u_(k-{t}) of input {row + 1}, "
                        "which the encoder state does not hold"
                    )
                continue
            # past is oldest first, so u_{k-t} sits at index held-1-t
            if past[held - 1 - t]:
                total = xor_bits(total, column)
    return total
