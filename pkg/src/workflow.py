"""Workflow — parallel fan-out/fan-in verification of subtrellis embeddings.

Uses Agent Framework's WorkflowBuilder: one executor per original start
state restores its subtrellis in a worker thread, and the fan-in aggregator
sorts the checks by start state, so the outcome is deterministic whatever
order the threads finish in.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass, field
from typing import Never

from agent_framework import WorkflowBuilder, WorkflowContext, executor

from src.convcode import format_bits
from src.errors import VerificationError
from src.oracle import Comparison, compare_path_sets
from src.reduction import (
    CodeReduction,
    ErrorReduction,
    ShiftDirection,
    embed_code_subtrellis,
    embed_error_subtrellis,
    restored_paths,
)
from src.trellis import State, enumerate_paths, extract_subtrellis

logger = logging.getLogger(__name__)


@dataclass
class EmbeddingCheck:
    state: State
    reduced_states: tuple[State, ...]
    comparison: Comparison

    @property
    def passed(self) -> bool:
        return self.comparison.passed


@dataclass
class EmbeddingVerification:
    checks: list[EmbeddingCheck] = field(default_factory=list)
    whole_set: Comparison | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and (
            self.whole_set is None or self.whole_set.passed
        )

    def summary(self) -> str:
        verdict = "pass" if self.passed else "fail"
        if self.checks:
            return f"all {len(self.checks)} subtrellises embedded: {verdict}"
        return f"restored path set: {verdict}"


# ── Workers ────────────────────────────────────────────────────────────


def _check_state(reduction: ErrorReduction | CodeReduction, state: State) -> EmbeddingCheck:
    if isinstance(reduction, CodeReduction):
        embedding = embed_code_subtrellis(reduction, state)
    else:
        embedding = embed_error_subtrellis(reduction, state)
    expected = [p.labels for p in extract_subtrellis(reduction.original, state)]
    return EmbeddingCheck(state, embedding.reduced_states, compare_path_sets(embedding.restored, expected))


def _check_whole_set(reduction: ErrorReduction | CodeReduction) -> Comparison:
    original = [p.labels for p in enumerate_paths(reduction.original)]
    return compare_path_sets(restored_paths(reduction), original)


async def check_embedding(reduction: ErrorReduction | CodeReduction, state: State) -> EmbeddingCheck:
    """Restore one subtrellis from the reduced trellis and compare with the original."""
    logger.info("[Workflow] Checking embedding of %s", format_bits(state))
    return await asyncio.to_thread(_check_state, reduction, state)


@dataclass(frozen=True, eq=False)
class EmbeddingRequest:
    reduction: ErrorReduction | CodeReduction


# ── Workflow executors ─────────────────────────────────────────────────


@executor
async def start_node(req: EmbeddingRequest, ctx: WorkflowContext[EmbeddingRequest]) -> None:
    """Entry point — fans the reduction out to every state check."""
    await ctx.send_message(req)


def state_checker(state: State):
    """Executor that checks the subtrellis starting at *state*."""

    async def check_state(req: EmbeddingRequest, ctx: WorkflowContext[EmbeddingCheck]) -> None:
        await ctx.send_message(await check_embedding(req.reduction, state))

    return executor(id=f"check-{''.join(map(str, state))}")(check_state)


@executor
async def aggregate(
    checks: list[EmbeddingCheck], ctx: WorkflowContext[Never, list[EmbeddingCheck]]
) -> None:
    """Fan-in aggregator — orders the checks by start state."""
    ordered = sorted(checks, key=lambda c: c.state)
    logger.info(
        "[Workflow] Aggregated — %d subtrellis checks, %d failed",
        len(ordered),
        sum(not c.passed for c in ordered),
    )
    await ctx.yield_output(ordered)


# ── Builder ────────────────────────────────────────────────────────────


def create_embedding_workflow(states: list[State]):
    """Build the fan-out/fan-in graph over the given start states.

    Graph:
        start_node ──fan-out──> check-<s_1> ─┐
                   ──fan-out──> check-<s_2> ─┤──fan-in──> aggregate ──> [EmbeddingCheck]
                   ──fan-out──> …           ─┘
    """
    checkers = [state_checker(s) for s in states]
    return (
        WorkflowBuilder(start_executor=start_node, name="subtrellis-embeddings")
        .add_fan_out_edges(start_node, checkers)
        .add_fan_in_edges(checkers, aggregate)
        .build()
    )


async def verify_embeddings(reduction: ErrorReduction | CodeReduction) -> EmbeddingVerification:
    """Check every subtrellis embedding plus the restored whole path set."""
    per_state = not (
        isinstance(reduction, ErrorReduction)
        and reduction.plan.direction is ShiftDirection.BACKWARD
    )
    checks: list[EmbeddingCheck] = []
    if per_state:
        workflow = create_embedding_workflow(sorted(reduction.original.states[0]))
        result = await workflow.run(EmbeddingRequest(reduction))
        outputs = result.get_outputs()
        if not outputs:
            raise VerificationError("embedding workflow returned no outputs")
        checks = outputs[0]
    whole = await asyncio.to_thread(_check_whole_set, reduction)
    logger.info("[Workflow] Whole path set %s", whole.describe())
    return EmbeddingVerification(checks, whole)
