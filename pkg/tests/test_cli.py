"""End-to-end tests for the tbtrellis command line."""

import json

import pytest

from src.cli import main
from src.config import GOLDEN_DIR


def golden(name: str) -> str:
    return str(GOLDEN_DIR / name)


@pytest.fixture(autouse=True)
def _output_dir(tmp_path, monkeypatch):
    monkeypatch.setattr("src.config.OUTPUT_DIR", tmp_path)


def run(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_check_canonical(capsys):
    code, out = run(capsys, "check", golden("h2.txt"))
    assert code == 0
    assert "M=3, ν=5, canonical" in out


def test_check_not_canonical(capsys):
    code, out = run(capsys, "check", golden("h2_delayed.txt"))
    assert code == 0
    assert "not canonical (rows share monomial factors)" in out


def test_check_empty_file(capsys, tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    code, out = run(capsys, "check", str(empty))
    assert code == 2
    assert "empty matrix" in out


def test_missing_file(capsys, tmp_path):
    code, out = run(capsys, "check", str(tmp_path / "nope.txt"))
    assert code == 7
    assert "does not exist" in out


def test_missing_received_word(capsys, tmp_path):
    code, out = run(capsys, "trellis", golden("h1.txt"), "--received", str(tmp_path / "z.txt"))
    assert code == 7
    assert "z.txt does not exist" in out


def test_directory_is_not_an_input_file(capsys, tmp_path):
    code, _ = run(capsys, "check", str(tmp_path))
    assert code == 7


def test_usage_error_wins_over_missing_file(capsys, tmp_path):
    code, out = run(capsys, "trellis", str(tmp_path / "nope.txt"))
    assert code == 2
    assert "--received" in out


def test_trellis_error(capsys, tmp_path):
    export = tmp_path / "fig2.dot"
    code, out = run(
        capsys,
        "trellis", golden("h1.txt"),
        "--received", golden("received.txt"),
        "--highlight", "(1,0)",
        "--export", str(export),
    )
    assert code == 0
    assert "σ_fin=(1,1)" in out
    assert "ζ=00 10 01 10" in out
    assert "subtrellis (1,0): 4 paths" in out
    assert "digraph" in export.read_text()


def test_trellis_code(capsys):
    code, out = run(capsys, "trellis", golden("g1.txt"), "--code", "--length", "4")
    assert code == 0
    assert "states per section: 4" in out


def test_trellis_needs_received(capsys):
    code, out = run(capsys, "trellis", golden("h1.txt"))
    assert code == 2
    assert "--received" in out


def test_reduce_forward_verify(capsys):
    code, out = run(
        capsys, "reduce", golden("h1.txt"), "--received", golden("received.txt"), "--auto-forward", "--verify"
    )
    assert code == 0
    assert "ν 2→1" in out
    assert "z̃=111 100 101 011" in out
    assert "σ̃_fin=(1)" in out
    assert "all 4 subtrellises embedded: pass" in out


def test_reduce_h2_prints_reduced_matrix(capsys):
    code, out = run(capsys, "reduce", golden("h2.txt"))
    assert code == 0
    assert "1+D, D, 1\n1, 1+D+D^2, D^2" in out
    assert "ν 5→3" in out


def test_reduce_backward(capsys, tmp_path):
    plan_out = tmp_path / "plan.txt"
    code, out = run(capsys, "reduce", golden("h2.txt"), "--backward", "2,3:2", "--plan-out", str(plan_out))
    assert code == 0
    assert "row delays: (2, 2)" in out
    assert plan_out.read_text() == "column 1: backward 0\ncolumn 2: backward 2\ncolumn 3: backward 2\n"


def test_reduce_empty_plan_exit_code(capsys):
    code, out = run(capsys, "reduce", golden("h1_reduced.txt"))
    assert code == 4
    assert "empty" in out


def test_reduce_code(capsys):
    code, out = run(capsys, "reduce", golden("g1.txt"), "--code", "--length", "4", "--verify")
    assert code == 0
    assert "ν 2→1" in out
    assert "all 4 subtrellises embedded: pass" in out


def test_restore(capsys, tmp_path):
    target = tmp_path / "restored.txt"
    code, _ = run(capsys, "restore", golden("reduced_paths.txt"), golden("plan_h1.txt"), "--output", str(target))
    assert code == 0
    assert target.read_text() == (GOLDEN_DIR / "subtrellis_paths.txt").read_text()


def test_restore_to_stdout(capsys):
    code, out = run(capsys, "restore", golden("reduced_paths.txt"), golden("plan_h1.txt"))
    assert code == 0
    assert out.splitlines()[0] == "100 110 010 111"


def test_verify(capsys):
    code, out = run(capsys, "verify", golden("h1.txt"), "--received", golden("received.txt"))
    assert code == 0
    assert "error trellis vs oracle: pass" in out


def test_json_output(capsys):
    code, out = run(capsys, "--json", "check", golden("h1.txt"))
    assert code == 0
    data = json.loads(out)
    assert data["nu"] == 2
    assert data["canonical"] is True


def test_output_is_deterministic(capsys):
    argv = ("reduce", golden("h1.txt"), "--received", golden("received.txt"))
    assert run(capsys, *argv) == run(capsys, *argv)


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["reduce"])
    assert exc.value.code == 2
