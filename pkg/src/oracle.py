"""Brute-force ground truth by direct cyclic convolution.

Nothing here goes through the syndrome former or the trellis code. A
length-N sequence of width-n symbols is packed into an int with bit
``(k-1)*n + j`` holding component j of symbol k; each output bit of a
cyclic convolution is the parity of the input ANDed with a fixed mask, so a
whole chunk of candidate words is checked at once with numpy.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np

from src.config import ENUMERATION_BUDGET_BITS, ORACLE_CHUNK_BITS
from src.convcode import SymbolSequence
from src.errors import BudgetExceeded, ShapeError, VerificationError
from src.gf2poly import PolyMatrix, expand

logger = logging.getLogger(__name__)


# ── PathSet ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class PathSet:
    """Sorted, duplicate-free set of equally shaped sequences."""

    sequences: tuple[SymbolSequence, ...]
    length: int
    width: int

    def __post_init__(self) -> None:
        for s in self.sequences:
            if (s.length, s.width) != (self.length, self.width):
                raise ShapeError(
                    f"path of shape {s.length}x{s.width} in a {self.length}x{self.width} set"
                )

    @classmethod
    def of(cls, sequences: Iterable[SymbolSequence], length: int | None = None, width: int | None = None) -> PathSet:
        unique = tuple(sorted(set(sequences)))
        if unique:
            length = unique[0].length if length is None else length
            width = unique[0].width if width is None else width
        if length is None or width is None:
            raise ShapeError("an empty path set needs an explicit shape")
        return cls(unique, length, width)

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[SymbolSequence]:
        return iter(self.sequences)

    def __contains__(self, item: object) -> bool:
        return item in set(self.sequences)

    def shifted(self, offset: SymbolSequence) -> PathSet:
        """{x + offset : x in self}."""
        return PathSet.of((s + offset for s in self.sequences), self.length, self.width)


# ── Vectorised scan ────────────────────────────────────────────────────


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    v ^= v >> np.uint64(32)
    v ^= v >> np.uint64(16)
    v ^= v >> np.uint64(8)
    v ^= v >> np.uint64(4)
    v &= np.uint64(0xF)
    return (np.uint64(0x6996) >> v) & np.uint64(1)


def _convolution_masks(coefficients, length: int, in_width: int, out_width: int, transpose: bool) -> list[int]:
    """masks[k*out_width + o]: input bits feeding output component o at time k+1.

    With *transpose* the taps are H_i^T (syndromes), otherwise G_i (codewords).
    """
    masks = [0] * (length * out_width)
    for k in range(length):
        for o in range(out_width):
            mask = 0
            for i, Ci in enumerate(coefficients):
                source_time = (k - i) % length
                for c in range(in_width):
                    tap = Ci[o, c] if transpose else Ci[c, o]
                    if tap:
                        mask ^= 1 << (source_time * in_width + c)
            masks[k * out_width + o] = mask
    return masks


def _scan(masks: list[int], n_bits: int, target: int | None) -> Iterator[np.ndarray]:
    """Yield (inputs, outputs) blocks; when *target* is set only matching inputs."""
    chunk = 1 << min(ORACLE_CHUNK_BITS, n_bits)
    mask_array = [np.uint64(m) for m in masks]
    for start in range(0, 1 << n_bits, chunk):
        values = np.arange(start, min(start + chunk, 1 << n_bits), dtype=np.uint64)
        out = np.zeros_like(values)
        for bit, mask in enumerate(mask_array):
            if mask:
                out |= _parity(values & mask) << np.uint64(bit)
        if target is None:
            yield np.stack([values, out])
        else:
            yield values[out == np.uint64(target)]


def _budget(n_bits: int, budget_bits: int | None) -> None:
    budget = ENUMERATION_BUDGET_BITS if budget_bits is None else budget_bits
    # words are packed into uint64
    budget = min(budget, 63)
    if n_bits > budget:
        raise BudgetExceeded("bits to enumerate", n_bits, budget)


def coset_paths(
    H: PolyMatrix, syndrome: SymbolSequence, length: int | None = None, budget_bits: int | None = None
) -> PathSet:
    """Every e with Σ_i e_⟨k−i⟩ H_i^T = ζ_k for all k."""
    length = syndrome.length if length is None else length
    if syndrome.width != H.n_rows or syndrome.length != length:
        raise ShapeError(f"syndrome shape {syndrome.length}x{syndrome.width} does not fit H and N={length}")
    n_bits = H.n_cols * length
    _budget(n_bits, budget_bits)
    _budget(H.n_rows * length, 64)
    masks = _convolution_masks(expand(H), length, H.n_cols, H.n_rows, transpose=True)
    found = np.concatenate(list(_scan(masks, n_bits, syndrome.to_int())))
    logger.debug("[Oracle] %d of 2^%d words have syndrome %s", found.size, n_bits, syndrome)
    return PathSet.of(
        (SymbolSequence.from_int(int(v), length, H.n_cols) for v in found), length, H.n_cols
    )


def tailbiting_codewords_oracle(G: PolyMatrix, length: int, budget_bits: int | None = None) -> PathSet:
    """{u G cyclically convolved : all u}."""
    n_bits = G.n_rows * length
    _budget(n_bits, budget_bits)
    _budget(G.n_cols * length, 64)
    masks = _convolution_masks(expand(G), length, G.n_rows, G.n_cols, transpose=False)
    words = np.concatenate([block[1] for block in _scan(masks, n_bits, None)])
    return PathSet.of(
        (SymbolSequence.from_int(int(v), length, G.n_cols) for v in np.unique(words)),
        length,
        G.n_cols,
    )


def cyclic_syndrome(H: PolyMatrix, e: SymbolSequence) -> SymbolSequence:
    """ζ of a single word, same convolution as ``coset_paths``."""
    masks = _convolution_masks(expand(H), e.length, H.n_cols, H.n_rows, transpose=True)
    value = e.to_int()
    bits = 0
    for bit, mask in enumerate(masks):
        bits |= (bin(value & mask).count("1") & 1) << bit
    return SymbolSequence.from_int(bits, e.length, H.n_rows)


# ── Comparison ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Comparison:
    passed: bool
    left_size: int
    right_size: int
    only_left: SymbolSequence | None = None
    only_right: SymbolSequence | None = None

    @property
    def counterexample(self) -> SymbolSequence | None:
        candidates = [s for s in (self.only_left, self.only_right) if s is not None]
        return min(candidates) if candidates else None

    def describe(self) -> str:
        if self.passed:
            return f"pass ({self.left_size} paths)"
        side = "left" if self.counterexample == self.only_left else "right"
        return (
            f"fail: {self.left_size} vs {self.right_size} paths, "
            f"{self.counterexample} only on the {side}"
        )


def compare_path_sets(a: PathSet | Iterable[SymbolSequence], b: PathSet | Iterable[SymbolSequence]) -> Comparison:
    left, right = set(a), set(b)
    only_left = sorted(left - right)
    only_right = sorted(right - left)
    return Comparison(
        passed=not only_left and not only_right,
        left_size=len(left),
        right_size=len(right),
        only_left=only_left[0] if only_left else None,
        only_right=only_right[0] if only_right else None,
    )


assert_equal = compare_path_sets


def require_equal(a: PathSet | Iterable[SymbolSequence], b: PathSet | Iterable[SymbolSequence], what: str = "path sets") -> Comparison:
    """``compare_path_sets`` that raises VerificationError on mismatch."""
    result = compare_path_sets(a, b)
    if not result.passed:
        raise VerificationError(f"{what} differ: {result.describe()}", result.counterexample)
    return result
