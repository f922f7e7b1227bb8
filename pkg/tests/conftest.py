import pathlib

import numpy as np
import pytest

from itbqc.protocol import Program, load_program

FIXTURE_DIR = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixture_dir() -> pathlib.Path:
    return FIXTURE_DIR


def fixture_program(name: str) -> Program:
    return load_program(FIXTURE_DIR / f"{name}.json")


def random_program(n, m, x, J, seed) -> Program:
    from itbqc.diagonal import random_gate

    rng = np.random.default_rng(seed)
    gates = tuple(
        tuple(random_gate(m, x, rng) for _ in range(n // m)) for _ in range(J)
    )
    return Program(n, m, x, J, gates)


def int_bits(value: int, width: int) -> list[int]:
    """Low-bit-first unpacking used to script enumeration tapes."""
    return [(value >> i) & 1 for i in range(width)]
