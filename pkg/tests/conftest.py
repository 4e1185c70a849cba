import math

import numpy as np
import pytest
from hypothesis import strategies as st

from dqcpart.circuit import ONE_QUBIT_GATES, Circuit, Gate

_NAMES = sorted(ONE_QUBIT_GATES)


def random_circuit(rng: np.random.Generator, n: int, num_gates: int, cx_frac: float = 0.5,
                   name: str = "rand") -> Circuit:
    """Random mix of CNOTs and parameterised one-qubit gates."""
    gates = []
    for _ in range(num_gates):
        if n >= 2 and rng.random() < cx_frac:
            a, b = rng.choice(n, size=2, replace=False)
            gates.append(Gate("cx", (int(a), int(b))))
        else:
            g = _NAMES[rng.integers(len(_NAMES))]
            params = tuple(float(x) for x in rng.uniform(-math.pi, math.pi, ONE_QUBIT_GATES[g]))
            gates.append(Gate(g, (int(rng.integers(n)),), params))
    return Circuit(n, tuple(gates), name)


@st.composite
def circuits(draw, min_qubits=2, max_qubits=6, max_gates=30):
    n = draw(st.integers(min_qubits, max_qubits))
    gates = []
    for _ in range(draw(st.integers(0, max_gates))):
        if draw(st.booleans()):
            a = draw(st.integers(0, n - 1))
            b = draw(st.integers(0, n - 2))
            gates.append(Gate("cx", (a, b if b < a else b + 1)))
        else:
            g = draw(st.sampled_from(_NAMES))
            params = tuple(draw(st.floats(-4, 4, allow_nan=False)) for _ in range(ONE_QUBIT_GATES[g]))
            gates.append(Gate(g, (draw(st.integers(0, n - 1)),), params))
    return Circuit(n, tuple(gates), "hyp")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance check, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
