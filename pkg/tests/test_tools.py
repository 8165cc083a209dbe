"""Tests for the command-level tools and their middleware."""

import logging

import pytest

from src.errors import CanonicityError, ParseError
from src.middleware import canonical_guardrail, tool_logging
from src.tools import (
    build_code_trellis_report,
    build_error_trellis_report,
    check_matrix,
    reduce_code_report,
    reduce_error_report,
    restore_paths,
    verify_code_reduction,
    verify_code_trellis,
    verify_error_reduction,
    verify_error_trellis,
)
from src.tools.reduce import parse_backward_spec
from tests.conftest import golden_text


@pytest.fixture(autouse=True)
def _output_dir(tmp_path, monkeypatch):
    monkeypatch.setattr("src.config.OUTPUT_DIR", tmp_path)


H1 = golden_text("h1.txt")
H2 = golden_text("h2.txt")
G1 = golden_text("g1.txt")
Z = "110 101 101 011"


# ── Middleware ─────────────────────────────────────────────────────────


def test_tool_logging(caplog):
    @tool_logging
    def double(x):
        return x * 2

    with caplog.at_level(logging.INFO, logger="src.middleware"):
        assert double(21) == 42
    assert "[ToolLog] CALLING double" in caplog.text
    assert "[ToolLog] double completed" in caplog.text


async def test_tool_logging_async(caplog):
    @tool_logging
    async def triple(x):
        return x * 3

    with caplog.at_level(logging.INFO, logger="src.middleware"):
        assert await triple(3) == 9
    assert "[ToolLog] CALLING triple" in caplog.text


def test_guardrail_blocks_non_canonical(caplog):
    @canonical_guardrail("parity_check")
    def tool(parity_check: str) -> str:
        return "ran"

    assert tool(H1) == "ran"
    with caplog.at_level(logging.WARNING, logger="src.middleware"):
        with pytest.raises(CanonicityError) as exc:
            tool(golden_text("h2_delayed.txt"))
    assert "rows share monomial factors" in exc.value.diagnostic
    assert "[Guardrail] BLOCKED" in caplog.text


# ── Check / build ──────────────────────────────────────────────────────


def test_check_matrix():
    report = check_matrix(H2)
    assert report.verdict == "M=3, ν=5, canonical"
    assert report.row_degrees == [3, 2]
    delayed = check_matrix(golden_text("h2_delayed.txt"))
    assert delayed.verdict == "M=4, ν=7, not canonical (rows share monomial factors)"


def test_check_matrix_parse_error():
    with pytest.raises(ParseError):
        check_matrix("")


def test_build_error_trellis_report(tmp_path):
    report = build_error_trellis_report(H1, Z, highlight="(1,0)", export_path="fig.dot")
    assert report.sigma_fin == "(1,1)"
    assert report.syndrome == "00 10 01 10"
    assert report.states_per_section == [4, 4, 4, 4]
    assert report.highlighted_paths == [
        "100 110 010 111",
        "100 111 111 001",
        "101 010 001 001",
        "101 011 100 111",
    ]
    assert report.export_path == str(tmp_path / "fig.dot")
    assert "bold" in (tmp_path / "fig.dot").read_text()


def test_build_code_trellis_report():
    report = build_code_trellis_report(G1, 4, highlight="(1,1)")
    assert report.kind == "code"
    assert report.sigma_fin is None
    assert report.states_per_section == [4, 4, 4, 4]
    assert "010 011 111 100" in report.highlighted_paths


def test_build_rejects_non_canonical():
    with pytest.raises(CanonicityError):
        build_error_trellis_report(golden_text("h2_delayed.txt"), "101 011 110 000 100 111")


# ── Reduce / restore ───────────────────────────────────────────────────


def test_parse_backward_spec():
    assert parse_backward_spec("2,3:2") == ([1, 2], 2)
    assert parse_backward_spec("3") == ([2], 1)
    with pytest.raises(ParseError):
        parse_backward_spec("a:2")


def test_reduce_error_report():
    report = reduce_error_report(H1, Z)
    assert report.nu_line == "ν 2→1"
    assert report.shifts == [0, 0, 1]
    assert report.shifted_received == "111 100 101 011"
    assert report.reduced_sigma_fin == "(1)"
    assert report.states_before == 4
    assert report.states_after == 2
    rows = {r.state: r for r in report.segments}
    assert rows["(1,0)"].reduced_states == ["(0)"]
    assert rows["(1,0)"].constraint == "section 1 component 3 = 1"
    assert {r.state: r.reduced for r in report.state_map}["(1,0)"] == "(0)"


def test_reduce_error_report_plan_only():
    report = reduce_error_report(H2)
    assert report.reduced_matrix == golden_text("h2_reduced.txt").strip()
    assert report.nu_line == "ν 5→3"
    assert report.shifted_received is None
    assert len(report.state_map) == 32


def test_reduce_error_report_backward():
    report = reduce_error_report(H2, backward="2,3:2")
    assert report.direction == "backward"
    assert report.row_delays == [2, 2]
    assert report.reduced_matrix == golden_text("h2_reduced.txt").strip()
    assert report.state_map == []


def test_reduce_code_report():
    report = reduce_code_report(G1, 4)
    assert report.role == "generator"
    assert report.reduced_matrix == "1+D, D, 1+D"
    assert report.nu_line == "ν 2→1"
    rows = {r.state: r for r in report.segments}
    assert rows["(1,1)"].reduced_states == ["(1)"]
    assert rows["(1,1)"].constraint == "section 4 restricted to 01x"


def test_restore_paths():
    report = restore_paths(golden_text("reduced_paths.txt"), golden_text("plan_h1.txt"))
    assert report.paths == [s.strip() for s in golden_text("subtrellis_paths.txt").splitlines()]
    assert restore_paths("", golden_text("plan_h1.txt")).to_text() == ""


def test_restore_round_trip():
    plan = golden_text("plan_h1.txt")
    shifted = restore_paths(Z, plan, inverse=True)
    assert shifted.paths == ["111 100 101 011"]
    assert restore_paths(shifted.to_text(), plan).paths == [Z]


# ── Verify ─────────────────────────────────────────────────────────────


async def test_verify_error_trellis():
    report = await verify_error_trellis(H1, Z)
    assert report.passed
    assert report.summary == "error trellis vs oracle: pass"


async def test_verify_code_trellis():
    report = await verify_code_trellis(G1, 4)
    assert report.passed
    assert len(report.checks) == 5


async def test_verify_error_reduction():
    report = await verify_error_reduction(H1, Z)
    assert report.passed
    assert report.summary == "all 4 subtrellises embedded: pass"


async def test_verify_backward_reduction():
    report = await verify_error_reduction(H2, golden_text("received_h2.txt").strip(), backward="2,3:2")
    assert report.passed
    assert report.summary == "restored path set: pass"


async def test_verify_code_reduction():
    report = await verify_code_reduction(G1, 4)
    assert report.passed
    assert report.summary == "all 4 subtrellises embedded: pass"
