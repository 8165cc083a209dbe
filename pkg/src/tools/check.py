"""Check tool — structural report for a polynomial matrix."""

from __future__ import annotations

from typing import Annotated

from pydantic import BaseModel, Field

from src.gf2poly import PolyMatrix, is_canonical, row_degrees
from src.middleware import tool_logging


class CheckReport(BaseModel):
    rows: int
    cols: int
    memory: int
    row_degrees: list[int]
    nu: int
    canonical: bool
    row_reduced: bool
    basic: bool
    diagnostic: str

    @property
    def verdict(self) -> str:
        if self.canonical:
            state = "canonical"
        elif "rows share monomial factors" in self.diagnostic:
            state = "not canonical (rows share monomial factors)"
        else:
            state = f"not canonical ({self.diagnostic})"
        return f"M={self.memory}, ν={self.nu}, {state}"


@tool_logging
def check_matrix(
    matrix: Annotated[str, Field(description="Polynomial matrix text, one row per line, e.g. 'D+D^2, D^2, 1+D'")],
) -> CheckReport:
    """Dimensions, memory length, row degrees, overall constraint length and canonicity."""
    m = PolyMatrix.parse(matrix)
    degrees = row_degrees(m)
    report = is_canonical(m)
    return CheckReport(
        rows=m.n_rows,
        cols=m.n_cols,
        memory=m.memory,
        row_degrees=degrees,
        nu=sum(degrees),
        canonical=report.canonical,
        row_reduced=report.row_reduced,
        basic=report.basic,
        diagnostic=report.diagnostic,
    )
