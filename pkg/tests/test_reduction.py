"""Tests for shift plans, state maps and reduced trellises."""

import dataclasses

import pytest

from src.convcode import format_bits, group_by_start_state, parse_bits, parse_sequence
from src.errors import DualityError, IndeterminateStateError, ParseError, PlanError, UnknownStateError
from src.gf2poly import PolyMatrix
from src.reduction import (
    MatrixRole,
    SegmentBit,
    ShiftDirection,
    ShiftPlan,
    admissible_segments,
    align_syndrome,
    embed_code_subtrellis,
    embed_error_subtrellis,
    joint_reduction,
    map_state,
    plan_backward_reduction,
    plan_code_reduction,
    plan_forward_reduction,
    reduce_code_trellis,
    reduce_error_trellis,
    restore_sequence,
    restored_paths,
    restriction_label,
    shift_sequence,
    state_map,
)
from src.synformer import parse_state
from src.trellis import enumerate_paths
from tests.conftest import golden_text


@pytest.fixture
def forward_plan(h1):
    return plan_forward_reduction(h1)


@pytest.fixture
def backward_plan(h2):
    return plan_backward_reduction(h2, [1, 2], 2)


@pytest.fixture
def error_reduction(h1, z, forward_plan):
    return reduce_error_trellis(h1, z, forward_plan)


@pytest.fixture
def code_reduction(g1):
    return reduce_code_trellis(g1, 4)


# ── Plans ──────────────────────────────────────────────────────────────


def test_forward_plan_h1(forward_plan, h1_reduced, catalog):
    assert forward_plan.direction is ShiftDirection.FORWARD
    assert list(forward_plan.shifts) == catalog["h1_forward"]["shifts"]
    assert forward_plan.reduced == h1_reduced
    assert forward_plan.nu_change() == (2, 1)


def test_forward_plan_h2(h2, h2_reduced, catalog):
    plan = plan_forward_reduction(h2)
    assert list(plan.shifts) == catalog["h2_forward"]["shifts"]
    assert plan.reduced == h2_reduced
    assert plan.nu_change() == (5, 3)


def test_backward_plan_h2(backward_plan, h2_delayed, h2_reduced, catalog):
    golden = catalog["h2_backward"]
    assert backward_plan.direction is ShiftDirection.BACKWARD
    assert list(backward_plan.shifts) == golden["shifts"]
    assert backward_plan.delayed == h2_delayed
    assert backward_plan.reduced == h2_reduced
    assert list(backward_plan.row_delays) == golden["row_delays"]
    assert backward_plan.nu_change() == (5, 3)


def test_forward_plan_errors(h1_reduced, h2_delayed):
    with pytest.raises(PlanError) as exc:
        plan_forward_reduction(h1_reduced)
    assert exc.value.kind == "empty"
    with pytest.raises(PlanError) as exc:
        plan_forward_reduction(h2_delayed)
    assert exc.value.kind == "non-canonical"
    with pytest.raises(PlanError) as exc:
        plan_forward_reduction(PolyMatrix.parse("D, 1+D"))
    assert exc.value.kind == "no-gain"


def test_backward_plan_errors(h2):
    with pytest.raises(PlanError) as exc:
        plan_backward_reduction(h2, [], 2)
    assert exc.value.kind == "empty"
    with pytest.raises(PlanError) as exc:
        plan_backward_reduction(h2, [3], 1)
    assert exc.value.kind == "inconsistent"


def test_code_plan_g1(g1, g1_reduced, catalog):
    plan = plan_code_reduction(g1)
    assert plan.role is MatrixRole.GENERATOR
    assert plan.direction is ShiftDirection.BACKWARD
    assert list(plan.shifts) == catalog["g1_code"]["shifts"]
    assert plan.reduced == g1_reduced
    assert plan.nu_change() == (2, 1)


def test_code_plan_errors(g1_reduced):
    with pytest.raises(PlanError) as exc:
        plan_code_reduction(g1_reduced)
    assert exc.value.kind == "no-gain"
    with pytest.raises(PlanError) as exc:
        plan_code_reduction(PolyMatrix.parse("1, 1+D"))
    assert exc.value.kind == "empty"


# ── Plan text ──────────────────────────────────────────────────────────


def test_plan_text_golden(forward_plan):
    assert forward_plan.to_text() == golden_text("plan_h1.txt")


def test_plan_from_text():
    plan = ShiftPlan.from_text("# shifts\ncolumn 3: forward 1\n")
    assert plan.shifts == (0, 0, 1)
    assert plan.direction is ShiftDirection.FORWARD
    with pytest.raises(PlanError):
        ShiftPlan.from_text("column 1: forward 1\ncolumn 2: backward 1\n")
    with pytest.raises(ParseError):
        ShiftPlan.from_text("column one: forward 1\n")
    with pytest.raises(ParseError):
        ShiftPlan.from_text("")


# ── Sequence shifts ────────────────────────────────────────────────────


def test_shift_received_word(z, forward_plan, catalog):
    shifted = shift_sequence(z, forward_plan)
    assert shifted.format() == catalog["h1_forward"]["shifted_received"]
    assert restore_sequence(shifted, forward_plan) == z


def test_restore_golden_paths(forward_plan, reduced_paths, subtrellis_paths):
    restored = sorted(restore_sequence(p, forward_plan) for p in reduced_paths)
    assert restored == sorted(subtrellis_paths)


def test_align_syndrome(h2, z_h2, backward_plan, forward_plan, z):
    reduction = reduce_error_trellis(h2, z_h2, backward_plan)
    assert reduction.reduced.syndrome == reduction.original.syndrome.rotate(2)
    assert align_syndrome(reduction.original.syndrome, backward_plan) == reduction.reduced.syndrome
    syndrome = parse_sequence("00 10 01 10")
    assert align_syndrome(syndrome, forward_plan) == syndrome


# ── State map and admissible segments ──────────────────────────────────


def test_state_map_golden(forward_plan, catalog):
    expected = catalog["h1_forward"]["state_map"]
    assert {format_bits(s): format_bits(t) for s, t in state_map(forward_plan).items()} == expected


def test_map_state_accepts_syndrome_former_state(h1, forward_plan):
    assert map_state(parse_state(h1, "(1,0)"), forward_plan, h1) == (0,)


def test_state_map_fibers(forward_plan):
    images = list(state_map(forward_plan).values())
    assert sorted(images.count(t) for t in set(images)) == [2, 2]


def test_admissible_segments_golden(forward_plan):
    segments = admissible_segments((1, 0), forward_plan)
    assert segments.forced == (SegmentBit(column=2, section=1, bit=1),)
    assert segments.determinate
    assert segments.reduced_states == ((0,),)
    assert segments.describe() == "section 1 component 3 = 1"


def test_admissible_segments_errors(h2, forward_plan, backward_plan):
    with pytest.raises(UnknownStateError):
        admissible_segments((1, 0, 1), forward_plan)
    with pytest.raises(PlanError) as exc:
        admissible_segments((0, 0, 0, 0, 0), backward_plan)
    assert exc.value.kind == "backward-only"
    with pytest.raises(PlanError):
        admissible_segments((1, 0), forward_plan, h2)


def test_indeterminate_is_a_plan_error():
    assert issubclass(IndeterminateStateError, PlanError)


# ── Error-trellis reduction ────────────────────────────────────────────


def test_reduce_error_trellis_golden(error_reduction, catalog):
    golden = catalog["h1_forward"]
    assert error_reduction.shifted.format() == golden["shifted_received"]
    assert format_bits(error_reduction.reduced.sigma_fin) == golden["reduced_sigma_fin"]
    assert error_reduction.reduced.syndrome == error_reduction.original.syndrome
    assert len(error_reduction.original.states[0]) == 4
    assert len(error_reduction.reduced.states[0]) == 2
    assert len(enumerate_paths(error_reduction.reduced, (0,))) == golden["reduced_paths_per_state"]


def test_embed_golden_subtrellis(error_reduction, reduced_paths, subtrellis_paths):
    embedding = embed_error_subtrellis(error_reduction, (1, 0))
    assert embedding.reduced_states == ((0,),)
    assert [p.labels for p in embedding.reduced_paths] == sorted(reduced_paths)
    assert list(embedding.restored) == sorted(subtrellis_paths)


def test_every_subtrellis_embeds(error_reduction):
    for state in error_reduction.original.states[0]:
        embedding = embed_error_subtrellis(error_reduction, state)
        expected = sorted(p.labels for p in enumerate_paths(error_reduction.original, state))
        assert list(embedding.restored) == expected


def test_restored_whole_set(error_reduction):
    assert restored_paths(error_reduction) == sorted(p.labels for p in enumerate_paths(error_reduction.original))


def test_backward_restored_whole_set(h2, z_h2, backward_plan):
    reduction = reduce_error_trellis(h2, z_h2, backward_plan)
    original = sorted(p.labels for p in enumerate_paths(reduction.original))
    assert len(original) == 64
    assert restored_paths(reduction) == original
    with pytest.raises(PlanError):
        embed_error_subtrellis(reduction, reduction.original.states[0][0])


def test_reduction_needs_long_enough_block(h2):
    with pytest.raises(PlanError) as exc:
        reduce_error_trellis(h2, parse_sequence("101 011 110"))
    assert exc.value.kind == "too-short"


# ── Code-trellis reduction ─────────────────────────────────────────────


def test_code_reduction_golden(code_reduction, catalog):
    golden = catalog["g1_code"]
    beta = parse_bits(golden["restriction_state"])
    assert len(code_reduction.original.states[0]) == 4
    assert len(code_reduction.reduced.states[0]) == 2
    assert format_bits(code_reduction.reduced_starts[beta]) == golden["reduced_start"]
    assert restriction_label(code_reduction, beta, golden["restriction_section"]) == golden["restriction"]
    assert restriction_label(code_reduction, beta, 1) == "xxx"


def test_code_subtrellis_embedding(g1, code_reduction, catalog):
    beta = parse_bits(catalog["g1"]["start_state"])
    embedding = embed_code_subtrellis(code_reduction, beta)
    assert embedding.outside == 0
    assert list(embedding.restored) == group_by_start_state(g1, 4)[beta]
    reduced_codeword = shift_sequence(parse_sequence(catalog["g1"]["codeword"]), code_reduction.plan)
    labels = [p.labels for p in embedding.reduced_paths]
    assert reduced_codeword in labels
    assert reduced_codeword.at(4) == (0, 1, 0)
    assert all(p.at(4)[:2] == (0, 1) for p in labels)


def test_every_code_subtrellis_embeds(g1, code_reduction):
    groups = group_by_start_state(g1, 4)
    for beta, group in groups.items():
        assert list(embed_code_subtrellis(code_reduction, beta).restored) == group


def test_code_embedding_without_restriction_is_not_exact(g1, code_reduction):
    loose = dataclasses.replace(
        code_reduction, restrictions={b: () for b in code_reduction.restrictions}
    )
    groups = group_by_start_state(g1, 4)
    for beta, group in groups.items():
        embedding = embed_code_subtrellis(loose, beta)
        assert embedding.outside > 0
        assert embedding.outside == len(embedding.restored) - len(group)
        assert set(group) <= set(embedding.restored)


def test_code_embedding_with_wrong_restriction_is_not_exact(code_reduction):
    flipped = {
        b: tuple(dataclasses.replace(bit, bit=bit.bit ^ 1) for bit in bits)
        for b, bits in code_reduction.restrictions.items()
    }
    wrong = dataclasses.replace(code_reduction, restrictions=flipped)
    for beta in code_reduction.restrictions:
        embedding = embed_code_subtrellis(wrong, beta)
        assert embedding.outside == len(embedding.restored)


def test_code_reduction_rejects_parity_check_plan(g1, forward_plan):
    with pytest.raises(PlanError):
        reduce_code_trellis(g1, 4, forward_plan)


# ── Joint reduction ────────────────────────────────────────────────────


def test_joint_reduction(g1, h1, z):
    joint = joint_reduction(g1, h1, z)
    assert joint.code is not None
    assert joint.error is not None
    assert joint.notes == ()


def test_joint_reduction_needs_dual_pair(h1, z):
    with pytest.raises(DualityError):
        joint_reduction(PolyMatrix.parse("1, 1, 1"), h1, z)
