"""Configuration — paths, enumeration budgets and log level, overridable from .env."""

from __future__ import annotations

import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env from project root
_PROJECT_ROOT = Path(__file__).resolve().parent.parent
load_dotenv(_PROJECT_ROOT / ".env")

# ── Paths ──────────────────────────────────────────────────────────────
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"
OUTPUT_DIR = _PROJECT_ROOT / os.getenv("OUTPUT_DIR", "output")

# ── Enumeration budgets ────────────────────────────────────────────────
# Exhaustive scans (codeword enumeration, oracle coset scan) cover at most
# 2**ENUMERATION_BUDGET_BITS words.
ENUMERATION_BUDGET_BITS: int = int(os.getenv("ENUMERATION_BUDGET_BITS", "24"))
PATH_BUDGET: int = int(os.getenv("PATH_BUDGET", str(2**20)))
ORACLE_CHUNK_BITS: int = int(os.getenv("ORACLE_CHUNK_BITS", "20"))

# ── Logging ────────────────────────────────────────────────────────────
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "WARNING").upper()


def ensure_output_dir() -> Path:
    """Create and return the output directory."""
    OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    return OUTPUT_DIR
