"""Verify tools — trellises and reductions against the brute-force oracle."""

from __future__ import annotations

import asyncio
from typing import TYPE_CHECKING, Annotated

from pydantic import BaseModel, Field

from src.convcode import format_bits, group_by_start_state, parse_sequence
from src.gf2poly import PolyMatrix
from src.middleware import canonical_guardrail, tool_logging
from src.oracle import Comparison, compare_path_sets, coset_paths, tailbiting_codewords_oracle
from src.reduction import reduce_code_trellis, reduce_error_trellis
from src.tools.reduce import error_plan
from src.trellis import build_code_trellis, build_error_trellis, enumerate_paths, extract_subtrellis

if TYPE_CHECKING:
    from src.workflow import EmbeddingVerification


class CheckRow(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyReport(BaseModel):
    checks: list[CheckRow]
    summary: str

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _row(name: str, comparison: Comparison) -> CheckRow:
    return CheckRow(name=name, passed=comparison.passed, detail=comparison.describe())


def _verdict(checks: list[CheckRow]) -> str:
    return "pass" if all(c.passed for c in checks) else "fail"


def _embedding_rows(verification: EmbeddingVerification) -> list[CheckRow]:
    rows = [
        CheckRow(
            name=f"subtrellis {format_bits(c.state)} → {', '.join(format_bits(s) for s in c.reduced_states)}",
            passed=c.passed,
            detail=c.comparison.describe(),
        )
        for c in verification.checks
    ]
    if verification.whole_set is not None:
        rows.append(_row("restored path set", verification.whole_set))
    return rows


@tool_logging
@canonical_guardrail("parity_check")
async def verify_error_trellis(
    parity_check: Annotated[str, Field(description="Parity-check matrix H(D) text")],
    received: Annotated[str, Field(description="Received word z")],
) -> VerifyReport:
    """Error-trellis paths against the exhaustive coset scan."""
    H, z = PolyMatrix.parse(parity_check), parse_sequence(received)
    trellis = await asyncio.to_thread(build_error_trellis, H, z)
    paths, coset = await asyncio.gather(
        asyncio.to_thread(lambda: [p.labels for p in enumerate_paths(trellis)]),
        asyncio.to_thread(coset_paths, H, trellis.syndrome),
    )
    checks = [_row("trellis paths vs coset scan", compare_path_sets(paths, coset))]
    return VerifyReport(checks=checks, summary=f"error trellis vs oracle: {_verdict(checks)}")


@tool_logging
@canonical_guardrail("generator")
async def verify_code_trellis(
    generator: Annotated[str, Field(description="Generator matrix G(D) text")],
    length: Annotated[int, Field(description="Block length N", ge=1)],
) -> VerifyReport:
    """Code-trellis paths against cyclic-convolution codewords, overall and per start state."""
    G = PolyMatrix.parse(generator)
    trellis = await asyncio.to_thread(build_code_trellis, G, length)
    codewords = await asyncio.to_thread(tailbiting_codewords_oracle, G, length)
    checks = [
        _row(
            "trellis paths vs codewords",
            compare_path_sets((p.labels for p in enumerate_paths(trellis)), codewords),
        )
    ]
    for beta, group in group_by_start_state(G, length).items():
        sub = [p.labels for p in extract_subtrellis(trellis, beta)]
        checks.append(_row(f"subtrellis {format_bits(beta)}", compare_path_sets(sub, group)))
    return VerifyReport(checks=checks, summary=f"code trellis vs oracle: {_verdict(checks)}")


@tool_logging
@canonical_guardrail("parity_check")
async def verify_error_reduction(
    parity_check: Annotated[str, Field(description="Parity-check matrix H(D) text")],
    received: Annotated[str, Field(description="Received word z")],
    backward: Annotated[str | None, Field(description="Backward plan 'columns:shift' (1-based); forward when omitted")] = None,
) -> VerifyReport:
    """Every subtrellis embedding, the restored path set, and the reduced trellis against the oracle."""
    from src.workflow import verify_embeddings

    H = PolyMatrix.parse(parity_check)
    reduction = reduce_error_trellis(H, parse_sequence(received), error_plan(H, backward))
    verification, coset = await asyncio.gather(
        verify_embeddings(reduction),
        asyncio.to_thread(coset_paths, reduction.plan.reduced, reduction.reduced.syndrome),
    )
    checks = _embedding_rows(verification)
    reduced_paths = [p.labels for p in enumerate_paths(reduction.reduced)]
    checks.append(_row("reduced trellis vs coset scan", compare_path_sets(reduced_paths, coset)))
    summary = f"{verification.summary().rsplit(':', 1)[0]}: {_verdict(checks)}"
    return VerifyReport(checks=checks, summary=summary)


@tool_logging
@canonical_guardrail("generator")
async def verify_code_reduction(
    generator: Annotated[str, Field(description="Generator matrix G(D) text")],
    length: Annotated[int, Field(description="Block length N", ge=1)],
) -> VerifyReport:
    """Every code subtrellis recovered from the reduced code trellis."""
    from src.workflow import verify_embeddings

    reduction = reduce_code_trellis(PolyMatrix.parse(generator), length)
    verification = await verify_embeddings(reduction)
    checks = _embedding_rows(verification)
    summary = f"{verification.summary().rsplit(':', 1)[0]}: {_verdict(checks)}"
    return VerifyReport(checks=checks, summary=summary)
