import math

import numpy as np
import pytest
from hypothesis import strategies as st

from hybridnor.params import MODES, TABLE_I, GateParams


@pytest.fixture
def table_i() -> GateParams:
    return TABLE_I


def log_uniform(lo: float, hi: float):
    return st.floats(math.log(lo), math.log(hi)).map(math.exp)


@st.composite
def gate_params(draw, v_dd=None):
    """Positive parameter sets with moderate stiffness (time-constant spread)."""
    vdd = draw(st.floats(0.5, 1.5)) if v_dd is None else v_dd
    return GateParams(
        r1=draw(log_uniform(5e3, 2e5)), r2=draw(log_uniform(5e3, 2e5)),
        r3=draw(log_uniform(5e3, 2e5)), r4=draw(log_uniform(5e3, 2e5)),
        c_int=draw(log_uniform(2e-17, 5e-16)), c_out=draw(log_uniform(1e-16, 2e-15)),
        v_dd=vdd,
    )


def random_params(rng: np.random.Generator, v_dd: float = 0.8) -> GateParams:
    lu = lambda lo, hi: float(math.exp(rng.uniform(math.log(lo), math.log(hi))))
    return GateParams(lu(5e3, 2e5), lu(5e3, 2e5), lu(5e3, 2e5), lu(5e3, 2e5),
                      lu(2e-17, 5e-16), lu(1e-16, 2e-15), v_dd=v_dd)


def random_schedule(rng: np.random.Generator, horizon: float, max_segments: int = 4):
    n = int(rng.integers(1, max_segments + 1))
    times = [0.0] + sorted(rng.uniform(0, horizon, n - 1).tolist())
    return [(t, MODES[int(rng.integers(0, 4))]) for t in times]


# -- acceptance summary ----------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
