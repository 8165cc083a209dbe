"""Exception hierarchy shared by the library, the tools and the CLI.

Every error raised on purpose derives from ``TrellisError`` and carries an
``exit_code`` the CLI maps straight to the process status.
"""

from __future__ import annotations


class TrellisError(Exception):
    """Base class for all expected failures."""

    exit_code = 1


class ParseError(TrellisError):
    """Raised when a matrix, sequence, state or plan text cannot be parsed."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{where}")


class InputFileError(TrellisError):
    """Raised when a file named on the command line is missing or not a regular file."""

    exit_code = 7

    def __init__(self, path: object):
        self.path = path
        super().__init__(f"{path} does not exist")


class ShapeError(TrellisError):
    """Raised when dimensions or widths do not fit together."""

    exit_code = 3


class CanonicityError(TrellisError):
    """Raised when a matrix that must be canonical is not."""

    exit_code = 3

    def __init__(self, message: str, diagnostic: str = ""):
        self.diagnostic = diagnostic
        super().__init__(f"{message}: {diagnostic}" if diagnostic else message)


class TailBitingLengthError(TrellisError):
    """Raised when the block length is too short for tail-biting."""

    exit_code = 3

    def __init__(self, length: int, memory: int, what: str = "memory length"):
        self.length = length
        self.memory = memory
        super().__init__(f"tail-biting needs N >= {what} ({memory}), got N={length}")


class UnknownStateError(TrellisError):
    """Raised when a state label does not exist in a trellis."""

    exit_code = 3


class InconsistentStateError(TrellisError):
    """Raised when a state is not in the image of the window equations."""

    exit_code = 3


class DualityError(TrellisError):
    """Raised when a generator/parity-check pair does not behave as a dual pair."""

    exit_code = 3


class PlanError(TrellisError):
    """Raised when a shift plan cannot be formed or applied.

    ``kind`` is one of ``empty``, ``non-canonical``, ``no-gain``,
    ``backward-only``, ``inconsistent`` or ``too-short``.
    """

    exit_code = 4

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


class IndeterminateStateError(PlanError):
    """Raised when a reduced state depends on tail bits the original state leaves free."""

    def __init__(self, message: str):
        super().__init__("indeterminate", message)


class VerificationError(TrellisError):
    """Raised when a construction disagrees with the brute-force oracle."""

    exit_code = 5

    def __init__(self, message: str, counterexample: object = None):
        self.counterexample = counterexample
        suffix = f" (counterexample: {counterexample})" if counterexample is not None else ""
        super().__init__(f"{message}{suffix}")


class BudgetExceeded(TrellisError):
    """Raised when an exhaustive enumeration would exceed its budget."""

    exit_code = 6

    def __init__(self, what: str, requested: int, budget: int):
        self.requested = requested
        self.budget = budget
        super().__init__(f"{what}: {requested} exceeds budget {budget}")
