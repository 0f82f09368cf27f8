from pathlib import Path

import pytest

from ripple_zkp.puzzle import parse_puzzle, parse_solution

PUZZLE_DIR = Path(__file__).resolve().parent.parent / "puzzles"


@pytest.fixture(scope="session")
def sample7x7_text() -> str:
    return (PUZZLE_DIR / "sample7x7.txt").read_text()


@pytest.fixture(scope="session")
def sample7x7_solution_text() -> str:
    return (PUZZLE_DIR / "sample7x7_solution.txt").read_text()


@pytest.fixture(scope="session")
def sample7x7(sample7x7_text):
    return parse_puzzle(sample7x7_text)


@pytest.fixture(scope="session")
def sample7x7_solution(sample7x7, sample7x7_solution_text):
    return parse_solution(sample7x7_solution_text, sample7x7)
