"""Tests for the parallel embedding verification."""

import dataclasses

from src.reduction import plan_backward_reduction, reduce_code_trellis, reduce_error_trellis
from src.workflow import EmbeddingRequest, check_embedding, create_embedding_workflow, verify_embeddings


async def test_forward_embeddings_h1(h1, z):
    verification = await verify_embeddings(reduce_error_trellis(h1, z))
    assert verification.passed
    assert [c.state for c in verification.checks] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert verification.summary() == "all 4 subtrellises embedded: pass"
    assert verification.whole_set.passed


async def test_single_embedding(h1, z):
    check = await check_embedding(reduce_error_trellis(h1, z), (1, 0))
    assert check.passed
    assert check.reduced_states == ((0,),)
    assert check.comparison.left_size == 4


async def test_forward_embeddings_h2(h2, z_h2):
    verification = await verify_embeddings(reduce_error_trellis(h2, z_h2))
    assert verification.passed
    assert len(verification.checks) == 32


async def test_backward_plan_checks_whole_set(h2, z_h2):
    reduction = reduce_error_trellis(h2, z_h2, plan_backward_reduction(h2, [1, 2], 2))
    verification = await verify_embeddings(reduction)
    assert verification.checks == []
    assert verification.summary() == "restored path set: pass"


async def test_code_embeddings(g1):
    verification = await verify_embeddings(reduce_code_trellis(g1, 4))
    assert verification.passed
    assert verification.summary() == "all 4 subtrellises embedded: pass"


async def test_code_embeddings_fail_without_restrictions(g1):
    reduction = reduce_code_trellis(g1, 4)
    loose = dataclasses.replace(reduction, restrictions={b: () for b in reduction.restrictions})
    verification = await verify_embeddings(loose)
    assert not verification.passed
    assert all(not c.passed for c in verification.checks)
    assert verification.summary() == "all 4 subtrellises embedded: fail"
    # the whole restored set does not depend on the restrictions
    assert verification.whole_set.passed


async def test_workflow_output_is_sorted_by_state(h1, z):
    reduction = reduce_error_trellis(h1, z)
    states = [(1, 1), (0, 1), (1, 0), (0, 0)]
    result = await create_embedding_workflow(states).run(EmbeddingRequest(reduction))
    outputs = result.get_outputs()
    assert len(outputs) == 1
    assert [c.state for c in outputs[0]] == sorted(states)
    assert all(c.passed for c in outputs[0])


async def test_code_embeddings_fail_when_restrictions_are_dropped(g1, monkeypatch):
    monkeypatch.setattr("src.reduction._restriction", lambda *args: ())
    verification = await verify_embeddings(reduce_code_trellis(g1, 4))
    assert not verification.passed
    assert [c.comparison.passed for c in verification.checks] == [False] * 4
