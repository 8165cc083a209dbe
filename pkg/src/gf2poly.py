"""Polynomials and polynomial matrices over GF(2) in the delay variable D.

A ``BinaryPoly`` is a dense bit vector held in a Python int: bit i is the
coefficient of D^i. Matrices are immutable grids of those. The structural
analyses every other module leans on live here too: coefficient expansion
H(D) = H_0 + H_1 D + ... + H_M D^M, monomial factors of columns and rows,
row degrees, the canonicity test and row re-canonicalisation.

Text format (one matrix row per line, entries separated by commas)::

    D+D^2, D^2, 1+D
"""

from __future__ import annotations

import functools
import itertools
import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src import gf2linalg
from src.errors import CanonicityError, ParseError, ShapeError

logger = logging.getLogger(__name__)


# ── Degree of the zero polynomial ──────────────────────────────────────


@functools.total_ordering
class _MinusInfinity:
    """Degree of the zero polynomial: compares below every integer."""

    __slots__ = ()

    def __eq__(self, other: object) -> bool:
        return other is self

    def __lt__(self, other: object) -> bool:
        return other is not self

    def __hash__(self) -> int:
        return hash("-inf")

    def __repr__(self) -> str:
        return "-inf"


MINUS_INFINITY = _MinusInfinity()
Degree = int | _MinusInfinity


# ── BinaryPoly ─────────────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class BinaryPoly:
    """Polynomial over GF(2); ``bits`` has bit i set iff D^i is present."""

    bits: int = 0

    def __post_init__(self) -> None:
        if self.bits < 0:
            raise ValueError("BinaryPoly bits must be non-negative")

    @classmethod
    def from_coefficients(cls, coefficients: Iterable[int]) -> BinaryPoly:
        bits = 0
        for i, c in enumerate(coefficients):
            if c & 1:
                bits |= 1 << i
        return cls(bits)

    @classmethod
    def monomial(cls, power: int) -> BinaryPoly:
        if power < 0:
            raise ValueError("monomial power must be >= 0")
        return cls(1 << power)

    @classmethod
    def parse(cls, text: str, line: int | None = None, offset: int = 0) -> BinaryPoly:
        return parse_poly(text, line=line, offset=offset)

    # ── structure ──

    @property
    def coefficients(self) -> tuple[int, ...]:
        """Normalised coefficient list; empty for the zero polynomial."""
        return tuple((self.bits >> i) & 1 for i in range(self.bits.bit_length()))

    @property
    def degree(self) -> Degree:
        return self.bits.bit_length() - 1 if self.bits else MINUS_INFINITY

    def is_zero(self) -> bool:
        return self.bits == 0

    def coefficient(self, power: int) -> int:
        return (self.bits >> power) & 1 if power >= 0 else 0

    def monomial_factor(self) -> int:
        """Largest l with D^l dividing this (nonzero) polynomial."""
        if not self.bits:
            raise ValueError("the zero polynomial has no monomial factor")
        return (self.bits & -self.bits).bit_length() - 1

    # ── arithmetic ──

    def __add__(self, other: BinaryPoly) -> BinaryPoly:
        return BinaryPoly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: BinaryPoly) -> BinaryPoly:
        a, b = self.bits, other.bits
        if a < b:
            a, b = b, a
        product = 0
        while b:
            if b & 1:
                product ^= a
            a <<= 1
            b >>= 1
        return BinaryPoly(product)

    def shift(self, power: int) -> BinaryPoly:
        """Multiply by D^power."""
        return BinaryPoly(self.bits << power)

    def divmod_monomial(self, power: int) -> tuple[BinaryPoly, BinaryPoly]:
        """Divide by D^power: (quotient, remainder) with deg(remainder) < power."""
        if power < 0:
            raise ValueError("divisor must be D^l with l >= 0")
        return BinaryPoly(self.bits >> power), BinaryPoly(self.bits & ((1 << power) - 1))

    def __divmod__(self, other: BinaryPoly) -> tuple[BinaryPoly, BinaryPoly]:
        if not other.bits:
            raise ZeroDivisionError("division by the zero polynomial")
        a, b = self.bits, other.bits
        db = b.bit_length()
        quotient = 0
        while a.bit_length() >= db:
            shift = a.bit_length() - db
            quotient |= 1 << shift
            a ^= b << shift
        return BinaryPoly(quotient), BinaryPoly(a)

    def __floordiv__(self, other: BinaryPoly) -> BinaryPoly:
        return divmod(self, other)[0]

    def __mod__(self, other: BinaryPoly) -> BinaryPoly:
        return divmod(self, other)[1]

    def gcd(self, other: BinaryPoly) -> BinaryPoly:
        a, b = self, other
        while b.bits:
            a, b = b, a % b
        return a

    def __bool__(self) -> bool:
        return bool(self.bits)

    def __str__(self) -> str:
        if not self.bits:
            return "0"
        terms = []
        for i in range(self.bits.bit_length()):
            if (self.bits >> i) & 1:
                terms.append("1" if i == 0 else "D" if i == 1 else f"D^{i}")
        return "+".join(terms)


ZERO = BinaryPoly(0)
ONE = BinaryPoly(1)
D = BinaryPoly(2)


def poly_arith(
    a: BinaryPoly,
    b: BinaryPoly,
    op: Literal["add", "mul", "divmod_by_monomial", "gcd"],
) -> BinaryPoly | tuple[BinaryPoly, BinaryPoly]:
    """Dispatch one of the four GF(2)[D] operations.

    ``divmod_by_monomial`` requires *b* to be a monomial D^l.
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "divmod_by_monomial":
        if b.bits == 0 or b.bits & (b.bits - 1):
            raise ValueError(f"divisor {b} is not a monomial D^l")
        return a.divmod_monomial(b.degree)  # type: ignore[arg-type]
    if op == "gcd":
        return a.gcd(b)
    raise ValueError(f"unknown operation {op!r}")


def poly_gcd(polys: Iterable[BinaryPoly]) -> BinaryPoly:
    """gcd of any number of polynomials; 0 when all are zero."""
    return functools.reduce(lambda x, y: x.gcd(y), polys, ZERO)


# ── Parsing ────────────────────────────────────────────────────────────


def parse_poly(text: str, line: int | None = None, offset: int = 0) -> BinaryPoly:
    """Parse ``1+D+D^3``-style text. Repeated terms cancel (GF(2))."""
    if not text.strip():
        raise ParseError("empty polynomial", line, offset + 1)
    bits = 0
    pos = 0
    for raw_term in text.split("+"):
        column = offset + pos + (len(raw_term) - len(raw_term.lstrip())) + 1
        term = "".join(raw_term.split())
        pos += len(raw_term) + 1
        if term == "0":
            continue
        if term == "1":
            bits ^= 1
        elif term == "D":
            bits ^= 2
        elif term.startswith("D^") and term[2:].isdigit():
            bits ^= 1 << int(term[2:])
        else:
            raise ParseError(f"bad polynomial term {term!r}", line, column)
    return BinaryPoly(bits)


# ── Coefficient expansion ──────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class CoeffExpansion:
    """[H_0, ..., H_M] as (rows, cols) uint8 bit matrices."""

    matrices: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.matrices)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.matrices[i]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.matrices)

    @property
    def memory(self) -> int:
        return len(self.matrices) - 1

    def transposes(self) -> np.ndarray:
        """Stack of H_i^T, shape (M+1, cols, rows)."""
        return np.stack([m.T for m in self.matrices]).astype(np.uint8)

    def reconstruct(self) -> PolyMatrix:
        rows, cols = self.matrices[0].shape
        entries = [
            [
                BinaryPoly.from_coefficients(int(m[i, j]) for m in self.matrices)
                for j in range(cols)
            ]
            for i in range(rows)
        ]
        return PolyMatrix.from_rows(entries)


# ── PolyMatrix ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class PolyMatrix:
    """Immutable m×n matrix over GF(2)[D]. Column and row indices are 0-based."""

    entries: tuple[tuple[BinaryPoly, ...], ...]

    def __post_init__(self) -> None:
        if not self.entries or not self.entries[0]:
            raise ShapeError("a polynomial matrix needs at least one row and one column")
        width = len(self.entries[0])
        for i, row in enumerate(self.entries):
            if len(row) != width:
                raise ShapeError(f"row {i + 1} has {len(row)} entries, expected {width}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[BinaryPoly | int | str]]) -> PolyMatrix:
        def coerce(x: BinaryPoly | int | str) -> BinaryPoly:
            if isinstance(x, BinaryPoly):
                return x
            if isinstance(x, str):
                return parse_poly(x)
            return BinaryPoly(x)

        return cls(tuple(tuple(coerce(x) for x in row) for row in rows))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> PolyMatrix:
        return cls(tuple(tuple(ZERO for _ in range(n_cols)) for _ in range(n_rows)))

    @classmethod
    def identity(cls, size: int) -> PolyMatrix:
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(size)) for i in range(size)))

    @classmethod
    def parse(cls, text: str) -> PolyMatrix:
        return parse_matrix(text)

    # ── shape ──

    @property
    def n_rows(self) -> int:
        return len(self.entries)

    @property
    def n_cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def memory(self) -> int:
        """Memory length M: the largest entry degree (0 for the zero matrix)."""
        degrees = [p.degree for row in self.entries for p in row if p]
        return max(degrees) if degrees else 0  # type: ignore[return-value]

    def __getitem__(self, index: tuple[int, int]) -> BinaryPoly:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> tuple[BinaryPoly, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[BinaryPoly, ...]:
        return tuple(row[j] for row in self.entries)

    # ── algebra ──

    def transpose(self) -> PolyMatrix:
        return PolyMatrix(tuple(self.column(j) for j in range(self.n_cols)))

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape} matrices")
        return PolyMatrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.n_cols != other.n_rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for i in range(self.n_rows):
            row = []
            for j in range(other.n_cols):
                acc = ZERO
                for t in range(self.n_cols):
                    acc = acc + self.entries[i][t] * other.entries[t][j]
                row.append(acc)
            out.append(tuple(row))
        return PolyMatrix(tuple(out))

    def is_zero(self) -> bool:
        return all(not p for row in self.entries for p in row)

    def multiply_column(self, j: int, power: int) -> PolyMatrix:
        return self._map_column(j, lambda p: p.shift(power))

    def divide_column(self, j: int, power: int) -> PolyMatrix:
        """Exact division of column j by D^power."""

        def divide(p: BinaryPoly) -> BinaryPoly:
            q, r = p.divmod_monomial(power)
            if r:
                raise ShapeError(f"column {j + 1} is not divisible by D^{power}")
            return q

        return self._map_column(j, divide)

    def _map_column(self, j: int, fn) -> PolyMatrix:
        return PolyMatrix(
            tuple(
                tuple(fn(p) if c == j else p for c, p in enumerate(row)) for row in self.entries
            )
        )

    def leading_coefficient_matrix(self) -> np.ndarray:
        """Bit matrix of the coefficients at each row's highest degree."""
        degrees = row_degrees(self)
        return np.array(
            [[p.coefficient(d) for p in row] for row, d in zip(self.entries, degrees)],
            dtype=np.uint8,
        )

    # ── text ──

    def format(self) -> str:
        return "\n".join(", ".join(str(p) for p in row) for row in self.entries)

    def __str__(self) -> str:
        return self.format()


def parse_matrix(text: str) -> PolyMatrix:
    """Parse the line-per-row text format. Blank lines and ``#`` comments are skipped."""
    rows: list[tuple[BinaryPoly, ...]] = []
    width: int | None = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        entries = []
        offset = 0
        for field in line.split(","):
            entries.append(parse_poly(field, line=line_no, offset=offset))
            offset += len(field) + 1
        if width is None:
            width = len(entries)
        elif len(entries) != width:
            raise ParseError(f"row has {len(entries)} entries, expected {width}", line_no)
        rows.append(tuple(entries))
    if not rows:
        raise ParseError("empty matrix", 1, 1)
    return PolyMatrix(tuple(rows))


# ── Structural analyses ────────────────────────────────────────────────


def expand(m: PolyMatrix) -> CoeffExpansion:
    """H(D) = H_0 + H_1 D + ... + H_M D^M."""
    return CoeffExpansion(
        tuple(
            np.array([[p.coefficient(i) for p in row] for row in m.entries], dtype=np.uint8)
            for i in range(m.memory + 1)
        )
    )


def column_monomial_factor(m: PolyMatrix, j: int) -> int:
    """Largest l such that D^l divides every nonzero entry of column j."""
    nonzero = [p for p in m.column(j) if p]
    if not nonzero:
        raise ShapeError(f"column {j + 1} is all-zero; its monomial factor is undefined")
    return min(p.monomial_factor() for p in nonzero)


def row_monomial_factor(m: PolyMatrix, i: int) -> int:
    nonzero = [p for p in m.row(i) if p]
    if not nonzero:
        raise ShapeError(f"row {i + 1} is all-zero")
    return min(p.monomial_factor() for p in nonzero)


def row_degrees(m: PolyMatrix) -> list[int]:
    degrees = []
    for i, row in enumerate(m.entries):
        nonzero = [p.degree for p in row if p]
        if not nonzero:
            raise ShapeError(f"row {i + 1} is all-zero")
        degrees.append(max(nonzero))
    return degrees  # type: ignore[return-value]


def overall_constraint_length(m: PolyMatrix) -> int:
    """ν = sum of row degrees (meaningful for canonical matrices)."""
    return sum(row_degrees(m))


def determinant(m: PolyMatrix) -> BinaryPoly:
    """Determinant of a square matrix; signs vanish in characteristic 2."""
    if m.n_rows != m.n_cols:
        raise ShapeError(f"determinant of a non-square {m.shape} matrix")
    total = ZERO
    for perm in itertools.permutations(range(m.n_rows)):
        term = ONE
        for i, j in enumerate(perm):
            term = term * m.entries[i][j]
            if not term:
                break
        total = total + term
    return total


def maximal_minors(m: PolyMatrix) -> list[BinaryPoly]:
    """All rows×rows minors, columns taken in lexicographic order."""
    return [
        determinant(PolyMatrix(tuple(tuple(row[j] for j in cols) for row in m.entries)))
        for cols in itertools.combinations(range(m.n_cols), m.n_rows)
    ]


@dataclass(frozen=True)
class CanonicityReport:
    """Verdict of ``is_canonical`` with the two sub-conditions kept apart."""

    row_reduced: bool
    basic: bool
    leading_rank: int
    minors_gcd: BinaryPoly
    row_factors: tuple[int, ...]
    diagnostic: str

    @property
    def canonical(self) -> bool:
        return self.row_reduced and self.basic

    def __bool__(self) -> bool:
        return self.canonical


def is_canonical(m: PolyMatrix) -> CanonicityReport:
    """Canonical = row-reduced (full-rank leading coefficients) and basic (minor gcd 1)."""
    if m.n_rows > m.n_cols:
        raise ShapeError(f"expected rows <= cols, got {m.shape}")
    degrees = row_degrees(m)
    leading_rank = gf2linalg.rank(m.leading_coefficient_matrix())
    minors_gcd = poly_gcd(maximal_minors(m))
    row_factors = tuple(row_monomial_factor(m, i) for i in range(m.n_rows))

    row_reduced = leading_rank == m.n_rows
    basic = minors_gcd == ONE
    problems = []
    if not row_reduced:
        problems.append(
            f"not row-reduced: leading-coefficient matrix has rank {leading_rank} < {m.n_rows}"
        )
    if not basic:
        problems.append(f"not basic: gcd of maximal minors is {minors_gcd}")
        if any(row_factors):
            factors = ", ".join(
                f"row {i + 1}: D^{f}" for i, f in enumerate(row_factors) if f
            )
            problems.append(f"rows share monomial factors ({factors})")
    diagnostic = "; ".join(problems) if problems else "row-reduced and basic"
    logger.debug("[Gf2poly] canonicity of %s: %s (row degrees %s)", m.shape, diagnostic, degrees)
    return CanonicityReport(row_reduced, basic, leading_rank, minors_gcd, row_factors, diagnostic)


# ── Re-canonicalisation ────────────────────────────────────────────────


@dataclass(frozen=True)
class Canonicalization:
    """Result of ``reduce_rows_to_canonical``.

    ``matrix = diag(D^-row_delays) · row_operations · source`` holds exactly.
    """

    source: PolyMatrix
    matrix: PolyMatrix
    row_delays: tuple[int, ...]
    row_operations: PolyMatrix

    @property
    def is_pure_delay(self) -> bool:
        return self.row_operations == PolyMatrix.identity(self.source.n_rows)


def _row_degree(row: Sequence[BinaryPoly]) -> int:
    return max(p.degree for p in row if p)  # type: ignore[return-value]


def reduce_rows_to_canonical(m: PolyMatrix) -> Canonicalization:
    """Strip per-row monomial delays, then row-reduce with D^t-multiples of rows.

    Raises CanonicityError when a row collapses to zero (rank-deficient input)
    or when the row-reduced result is still not basic.
    """
    size = m.n_rows
    rows = [list(r) for r in m.entries]
    ops = [list(r) for r in PolyMatrix.identity(size).entries]
    delays = [0] * size
    for i, row in enumerate(rows):
        if not any(row):
            raise CanonicityError("cannot canonicalise", f"row {i + 1} is all-zero")

    # every step lowers the total row degree, so this terminates
    while True:
        for i, row in enumerate(rows):
            factor = min(p.monomial_factor() for p in row if p)
            if factor:
                rows[i] = [p.divmod_monomial(factor)[0] for p in row]
                delays[i] += factor
        current = PolyMatrix(tuple(tuple(r) for r in rows))
        leading = current.leading_coefficient_matrix()
        if gf2linalg.rank(leading) == size:
            break

        dependency = gf2linalg.nullspace(leading.T)[0]
        support = [i for i in range(size) if dependency[i]]
        degrees = {i: _row_degree(rows[i]) for i in support}
        target = max(support, key=lambda i: (degrees[i], i))
        d_star = degrees[target]

        new_row = [ZERO] * m.n_cols
        for i in support:
            shift = d_star - degrees[i]
            new_row = [a + b.shift(shift) for a, b in zip(new_row, rows[i])]
        if not any(new_row):
            raise CanonicityError(
                "cannot canonicalise",
                f"rows {', '.join(str(i + 1) for i in support)} are dependent (rank-deficient)",
            )

        exponents = {
            i: d_star - degrees[i] - delays[i] + delays[target] for i in support
        }
        bump = max(0, -min(exponents.values()))
        new_ops = [ZERO] * size
        for i in support:
            new_ops = [a + b.shift(exponents[i] + bump) for a, b in zip(new_ops, ops[i])]
        rows[target] = new_row
        ops[target] = new_ops
        delays[target] += bump
        logger.debug("[Gf2poly] row %d reduced using rows %s", target + 1, support)

    result = PolyMatrix(tuple(tuple(r) for r in rows))
    report = is_canonical(result)
    if not report.canonical:
        raise CanonicityError("row reduction did not reach a canonical matrix", report.diagnostic)
    return Canonicalization(
        source=m,
        matrix=result,
        row_delays=tuple(delays),
        row_operations=PolyMatrix(tuple(tuple(r) for r in ops)),
    )
