"""Shared fixtures: golden matrices and sequences loaded from the package data."""

import json

import pytest

from src.config import GOLDEN_DIR
from src.convcode import parse_sequence, read_sequences
from src.gf2poly import PolyMatrix


def golden_text(name: str) -> str:
    return (GOLDEN_DIR / name).read_text()


@pytest.fixture(scope="session")
def catalog():
    with open(GOLDEN_DIR / "catalog.json") as f:
        return json.load(f)


@pytest.fixture
def h1():
    return PolyMatrix.parse(golden_text("h1.txt"))


@pytest.fixture
def h1_reduced():
    return PolyMatrix.parse(golden_text("h1_reduced.txt"))


@pytest.fixture
def g1():
    return PolyMatrix.parse(golden_text("g1.txt"))


@pytest.fixture
def g1_reduced():
    return PolyMatrix.parse(golden_text("g1_reduced.txt"))


@pytest.fixture
def h2():
    return PolyMatrix.parse(golden_text("h2.txt"))


@pytest.fixture
def h2_delayed():
    return PolyMatrix.parse(golden_text("h2_delayed.txt"))


@pytest.fixture
def h2_reduced():
    return PolyMatrix.parse(golden_text("h2_reduced.txt"))


@pytest.fixture
def z():
    """Received word of the H1 examples."""
    return parse_sequence(golden_text("received.txt"))


@pytest.fixture
def z_h2():
    return parse_sequence(golden_text("received_h2.txt"))


@pytest.fixture
def subtrellis_paths():
    """Original error subtrellis at (1,0)."""
    return read_sequences(golden_text("subtrellis_paths.txt"))


@pytest.fixture
def reduced_paths():
    """Admissible reduced paths for (1,0)."""
    return read_sequences(golden_text("reduced_paths.txt"))
