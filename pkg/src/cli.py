"""Command-line front end.

Usage:
    tbtrellis check H.txt
    tbtrellis trellis H.txt --received z.txt --highlight "(1,0)" --export fig2.dot
    tbtrellis trellis G.txt --code --length 4
    tbtrellis reduce H.txt --received z.txt --auto-forward --verify
    tbtrellis reduce H.txt --backward 2,3:2
    tbtrellis reduce G.txt --code --length 4 --verify
    tbtrellis restore paths.txt plan.txt
    tbtrellis verify H.txt --received z.txt
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ValidationError, model_validator
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from src.config import LOG_LEVEL, ensure_output_dir
from src.convcode import read_sequences
from src.errors import InputFileError, ParseError, TrellisError
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
from src.tools.build import TrellisReport
from src.tools.reduce import ReductionReport
from src.tools.verify import VerifyReport

logger = logging.getLogger(__name__)

console = Console(soft_wrap=True, highlight=False)


# ── Run configuration ──────────────────────────────────────────────────


class RunConfig(BaseModel):
    command: Literal["check", "trellis", "reduce", "restore", "verify"]
    matrix_path: Path | None = None
    role: Literal["generator", "parity-check"] = "parity-check"
    received_path: Path | None = None
    length: int | None = None
    highlight: str | None = None
    backward: str | None = None
    verify: bool = False
    export_path: Path | None = None
    planar_tail: bool = False
    paths_path: Path | None = None
    plan_path: Path | None = None
    output_path: Path | None = None
    plan_out: Path | None = None
    inverse: bool = False
    json_output: bool = False
    verbose: bool = False

    @model_validator(mode="after")
    def _check_inputs(self) -> RunConfig:
        if self.command in ("trellis", "verify") or (self.command == "reduce" and self.role == "generator"):
            if self.role == "generator" and self.length is None:
                raise ValueError("--code needs --length")
            if self.command != "reduce" and self.role == "parity-check" and self.received_path is None:
                raise ValueError("an error trellis needs --received")
        if self.backward and self.role == "generator":
            raise ValueError("--backward applies to parity-check matrices")
        return self

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        values = {k: v for k, v in vars(args).items() if v is not None}
        if values.pop("code", False):
            values["role"] = "generator"
        values.pop("auto_forward", None)
        return cls(**values)

    def require_inputs(self) -> None:
        """Raise InputFileError for the first input path that is not a file."""
        for name in ("matrix_path", "received_path", "paths_path", "plan_path"):
            path = getattr(self, name)
            if path is not None and not path.is_file():
                raise InputFileError(path)


# ── Readers ────────────────────────────────────────────────────────────


def _read_received(path: Path) -> str:
    sequences = read_sequences(path)
    if len(sequences) != 1:
        raise ParseError(f"{path} must hold exactly one sequence, found {len(sequences)}")
    return sequences[0].format()


def _emit_json(*reports: BaseModel) -> None:
    data = [r.model_dump(mode="json") for r in reports]
    console.print_json(json.dumps(data[0] if len(data) == 1 else data))


# ── Renderers ──────────────────────────────────────────────────────────


def _print_trellis(report: TrellisReport) -> None:
    table = Table(title=f"{report.kind} trellis, N={report.sections}")
    table.add_column("section", justify="right")
    table.add_column("states", justify="right")
    table.add_column("branches", justify="right")
    for k, (s, b) in enumerate(zip(report.states_per_section, report.branches_per_section), start=1):
        table.add_row(str(k), str(s), str(b))
    console.print(table)
    console.print(f"states per section: {report.states_per_section[0]}", markup=False)
    if report.sigma_fin is not None:
        console.print(f"σ_fin={report.sigma_fin}", markup=False)
        console.print(f"ζ={report.syndrome}", markup=False)
    if report.highlight is not None:
        console.print(
            f"subtrellis {report.highlight}: {len(report.highlighted_paths)} paths", markup=False
        )
        for p in report.highlighted_paths:
            console.print(f"  {p}", markup=False)
    if report.export_path:
        console.print(f"graph written to {report.export_path}", markup=False)


def _print_reduction(report: ReductionReport) -> None:
    console.print(f"plan ({report.role}, {report.direction}): l={tuple(report.shifts)}", markup=False)
    if report.delayed_matrix is not None:
        console.print("delayed matrix:", markup=False)
        console.print(report.delayed_matrix, markup=False)
        console.print(f"row delays: {tuple(report.row_delays)}", markup=False)
    console.print("reduced matrix:", markup=False)
    console.print(report.reduced_matrix, markup=False)
    console.print(
        f"{report.nu_line}, states {report.states_before}→{report.states_after}", markup=False
    )
    if report.shifted_received is not None:
        console.print(f"z̃={report.shifted_received}", markup=False)
        console.print(f"σ_fin={report.sigma_fin}  σ̃_fin={report.reduced_sigma_fin}", markup=False)
        console.print(f"ζ={report.syndrome}  ζ̃={report.reduced_syndrome}", markup=False)
    if report.state_map:
        table = Table(title="state map")
        table.add_column("state")
        table.add_column("reduced")
        for row in report.state_map:
            table.add_row(row.state, row.reduced)
        console.print(table)
    if report.segments:
        table = Table(title="admissible segments" if report.role == "parity-check" else "restrictions")
        table.add_column("state")
        table.add_column("reduced start")
        table.add_column("constraint")
        for row in report.segments:
            table.add_row(row.state, ", ".join(row.reduced_states), row.constraint)
        console.print(table)


def _print_verification(report: VerifyReport) -> None:
    table = Table(title="verification")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    for c in report.checks:
        table.add_row(c.name, "pass" if c.passed else "FAIL", c.detail)
    console.print(table)
    console.print(Panel(report.summary, style="green" if report.passed else "red"))


# ── Commands ───────────────────────────────────────────────────────────


def cmd_check(cfg: RunConfig) -> int:
    report = check_matrix(cfg.matrix_path.read_text())
    if cfg.json_output:
        _emit_json(report)
        return 0
    console.print(
        f"{report.rows}×{report.cols}, row degrees {report.row_degrees}", markup=False
    )
    console.print(report.verdict, markup=False)
    if not report.canonical:
        console.print(report.diagnostic, markup=False)
    return 0


def cmd_trellis(cfg: RunConfig) -> int:
    matrix = cfg.matrix_path.read_text()
    export = str(cfg.export_path) if cfg.export_path else None
    if cfg.role == "generator":
        report = build_code_trellis_report(matrix, cfg.length, cfg.highlight, export, cfg.planar_tail)
    else:
        report = build_error_trellis_report(
            matrix, _read_received(cfg.received_path), cfg.highlight, export, cfg.planar_tail
        )
    if cfg.json_output:
        _emit_json(report)
    else:
        _print_trellis(report)
    return 0


def cmd_reduce(cfg: RunConfig) -> int:
    matrix = cfg.matrix_path.read_text()
    verification: VerifyReport | None = None
    if cfg.role == "generator":
        report = reduce_code_report(matrix, cfg.length)
        if cfg.verify:
            verification = asyncio.run(verify_code_reduction(matrix, cfg.length))
    else:
        received = _read_received(cfg.received_path) if cfg.received_path else None
        report = reduce_error_report(matrix, received, cfg.backward)
        if cfg.verify:
            if received is None:
                raise ParseError("--verify needs --received")
            verification = asyncio.run(verify_error_reduction(matrix, received, cfg.backward))
    if cfg.plan_out:
        cfg.plan_out.write_text(report.plan_text)
    if cfg.json_output:
        _emit_json(report, *([verification] if verification else []))
    else:
        _print_reduction(report)
        if verification is not None:
            _print_verification(verification)
    return 0 if verification is None or verification.passed else 5


def cmd_restore(cfg: RunConfig) -> int:
    report = restore_paths(cfg.paths_path.read_text(), cfg.plan_path.read_text(), cfg.inverse)
    if cfg.output_path:
        target = cfg.output_path
        if not target.is_absolute() and target.parent == Path("."):
            target = ensure_output_dir() / target
        target.write_text(report.to_text())
        logger.info("[CLI] wrote %d paths to %s", len(report.paths), target)
    if cfg.json_output:
        _emit_json(report)
    elif not cfg.output_path:
        for p in report.paths:
            console.print(p, markup=False)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    matrix = cfg.matrix_path.read_text()
    if cfg.role == "generator":
        report = asyncio.run(verify_code_trellis(matrix, cfg.length))
    else:
        received = _read_received(cfg.received_path)
        report = asyncio.run(verify_error_trellis(matrix, received))
    if cfg.json_output:
        _emit_json(report)
    else:
        _print_verification(report)
    return 0 if report.passed else 5


COMMANDS = {
    "check": cmd_check,
    "trellis": cmd_trellis,
    "reduce": cmd_reduce,
    "restore": cmd_restore,
    "verify": cmd_verify,
}


# ── Argument parsing ───────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tbtrellis",
        description="Tail-biting code/error trellises and their reduction by shifted subsequences",
    )
    parser.add_argument("--json", dest="json_output", action="store_true", help="Print the report as JSON")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def matrix_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("matrix_path", type=Path, help="Matrix file (one row per line)")
        p.add_argument("--code", action="store_true", help="The matrix is a generator G(D)")
        p.add_argument("--error", action="store_true", help="The matrix is a parity-check H(D) (default)")
        p.add_argument("--received", dest="received_path", type=Path, help="File holding the received word z")
        p.add_argument("--length", type=int, help="Block length N for code trellises")

    p = sub.add_parser("check", help="Dimensions, degrees and canonicity of a matrix")
    p.add_argument("matrix_path", type=Path)

    p = sub.add_parser("trellis", help="Build a tail-biting trellis")
    matrix_args(p)
    p.add_argument("--highlight", help="Start state to list and draw bold, e.g. '(1,0)'")
    p.add_argument("--export", dest="export_path", type=Path, help="Write DOT source here")
    p.add_argument("--planar-tail", action="store_true", help="Repeat section 1 after section N")

    p = sub.add_parser("reduce", help="Reduce a trellis by shifted subsequences")
    matrix_args(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--auto-forward", action="store_true", help="Divide columns by their monomial factors (default)")
    mode.add_argument("--backward", help="Delay columns, e.g. '2,3:2' (1-based columns : shift)")
    p.add_argument("--verify", action="store_true", help="Check every subtrellis embedding")
    p.add_argument("--plan-out", type=Path, help="Write the plan text here")

    p = sub.add_parser("restore", help="Undo a shift plan on a file of paths")
    p.add_argument("paths_path", type=Path)
    p.add_argument("plan_path", type=Path)
    p.add_argument("--output", dest="output_path", type=Path, help="Write restored paths here")
    p.add_argument("--inverse", action="store_true", help="Apply the shift instead")

    p = sub.add_parser("verify", help="Compare a trellis with the brute-force oracle")
    matrix_args(p)
    return parser


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else LOG_LEVEL,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.__dict__.pop("error", None)
    _setup_logging(args.verbose)
    try:
        cfg = RunConfig.from_args(args)
    except ValidationError as exc:
        for err in exc.errors():
            console.print(f"error: {err['msg']}", markup=False)
        return 2
    try:
        cfg.require_inputs()
        return COMMANDS[cfg.command](cfg)
    except TrellisError as exc:
        console.print(f"error: {exc}", markup=False)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
