"""Circuit IR: gates over logical qubits, benchmark generators, timelines."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

# name -> number of angle parameters
ONE_QUBIT_GATES: dict[str, int] = {
    "u3": 3, "u2": 2, "u1": 1,
    "rx": 1, "ry": 1, "rz": 1,
    "h": 0, "x": 0, "y": 0, "z": 0,
    "s": 0, "sdg": 0, "t": 0, "tdg": 0, "id": 0,
}


class CircuitError(ValueError):
    """Raised when a gate or circuit violates the IR invariants."""


@dataclass(frozen=True)
class Gate:
    """A single gate. ``name == "cx"`` marks a CNOT, anything else is one-qubit.

    ``qubits`` is ``(target,)`` for one-qubit gates and ``(control, target)``
    for CNOTs. ``seq`` is the position inside the owning circuit.
    """

    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    seq: int = -1

    def __post_init__(self):
        if self.name == "cx":
            if len(self.qubits) != 2 or self.params:
                raise CircuitError("cx takes two qubits and no parameters")
            if self.qubits[0] == self.qubits[1]:
                raise CircuitError(f"cx control equals target ({self.qubits[0]})")
        elif self.name in ONE_QUBIT_GATES:
            if len(self.qubits) != 1:
                raise CircuitError(f"{self.name} acts on exactly one qubit")
            if len(self.params) != ONE_QUBIT_GATES[self.name]:
                raise CircuitError(
                    f"{self.name} expects {ONE_QUBIT_GATES[self.name]} parameters, "
                    f"got {len(self.params)}"
                )
        else:
            raise CircuitError(f"unsupported gate {self.name!r}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError("negative qubit index")

    @property
    def is_cnot(self) -> bool:
        return self.name == "cx"

    @property
    def control(self) -> int:
        return self.qubits[0]

    @property
    def target(self) -> int:
        return self.qubits[-1]


def cnot(control: int, target: int) -> Gate:
    return Gate("cx", (control, target))


def one_qubit(name: str, target: int, *params: float) -> Gate:
    return Gate(name, (target,), tuple(float(p) for p in params))


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered gate list. Gates are renumbered so ``seq`` is 0..len-1."""

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    name: str = "circuit"

    def __post_init__(self):
        if self.num_qubits < 0:
            raise CircuitError("num_qubits must be non-negative")
        renumbered = []
        for i, g in enumerate(self.gates):
            if any(q >= self.num_qubits for q in g.qubits):
                raise CircuitError(
                    f"gate {i} ({g.name} {list(g.qubits)}) out of range for "
                    f"{self.num_qubits} qubits"
                )
            renumbered.append(g if g.seq == i else Gate(g.name, g.qubits, g.params, i))
        object.__setattr__(self, "gates", tuple(renumbered))

    def __len__(self) -> int:
        return len(self.gates)

    @cached_property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.is_cnot)

    @property
    def one_qubit_count(self) -> int:
        return len(self.gates) - self.cnot_count

    def same_gates(self, other: "Circuit", digits: int = 12) -> bool:
        """Structural equality of gate lists, params compared to ``digits`` decimals."""
        if self.num_qubits != other.num_qubits or len(self) != len(other):
            return False
        for a, b in zip(self.gates, other.gates):
            if a.name != b.name or a.qubits != b.qubits or len(a.params) != len(b.params):
                return False
            if any(round(x - y, digits) != 0 for x, y in zip(a.params, b.params)):
                return False
        return True


class CircuitBuilder:
    """Mutable helper for assembling circuits gate by gate."""

    def __init__(self, num_qubits: int, name: str = "circuit"):
        self.num_qubits = num_qubits
        self.name = name
        self.gates: list[Gate] = []

    def cx(self, control: int, target: int) -> "CircuitBuilder":
        self.gates.append(cnot(control, target))
        return self

    def gate(self, name: str, target: int, *params: float) -> "CircuitBuilder":
        self.gates.append(one_qubit(name, target, *params))
        return self

    def extend(self, gates: Sequence[Gate]) -> "CircuitBuilder":
        self.gates.extend(Gate(g.name, g.qubits, g.params) for g in gates)
        return self

    def ccx(self, a: int, b: int, c: int) -> "CircuitBuilder":
        """Toffoli in the standard 6-CNOT Clifford+T decomposition."""
        self.gate("h", c)
        self.cx(b, c).gate("tdg", c)
        self.cx(a, c).gate("t", c)
        self.cx(b, c).gate("tdg", c)
        self.cx(a, c).gate("t", b).gate("t", c).gate("h", c)
        self.cx(a, b).gate("t", a).gate("tdg", b)
        self.cx(a, b)
        return self

    def cphase(self, theta: float, control: int, target: int) -> "CircuitBuilder":
        """Controlled phase as u1 + 2 CNOTs."""
        self.gate("u1", control, theta / 2)
        self.cx(control, target).gate("u1", target, -theta / 2)
        self.cx(control, target).gate("u1", target, theta / 2)
        return self

    def swap(self, a: int, b: int) -> "CircuitBuilder":
        return self.cx(a, b).cx(b, a).cx(a, b)

    def zz(self, theta: float, a: int, b: int) -> "CircuitBuilder":
        """exp(-i theta/2 Z_a Z_b) as cx-rz-cx."""
        return self.cx(a, b).gate("rz", b, theta).cx(a, b)

    def build(self) -> Circuit:
        return Circuit(self.num_qubits, tuple(self.gates), self.name)


def gen_qft(n: int) -> Circuit:
    """Textbook QFT with controlled phases as {u1, cx} and a final swap network.

    CNOT count is ``n*(n-1) + 3*(n//2)``.
    """
    if n < 1:
        raise CircuitError("QFT needs at least one qubit")
    b = CircuitBuilder(n, f"qft{n}")
    for j in range(n):
        b.gate("h", j)
        for k in range(j + 1, n):
            b.cphase(math.pi / 2 ** (k - j), k, j)
    for i in range(n // 2):
        b.swap(i, n - 1 - i)
    return b.build()


def gen_tfim(n: int, steps: int, *, coupling: float = 1.0, field: float = 1.0,
             dt: float = 0.1) -> Circuit:
    """First-order Trotterized transverse-field Ising chain.

    Each step applies a ZZ rotation (cx-rz-cx) on every neighbouring pair
    followed by an rx layer, so the circuit has ``2*(n-1)*steps`` CNOTs.
    """
    if n < 2 or steps < 1:
        raise CircuitError("TFIM needs n >= 2 and steps >= 1")
    b = CircuitBuilder(n, f"tfim{n}_{steps}")
    for _ in range(steps):
        for i in range(n - 1):
            b.zz(2 * coupling * dt, i, i + 1)
        for i in range(n):
            b.gate("rx", i, 2 * field * dt)
    return b.build()


def per_qubit_timelines(c: Circuit) -> list[list[int]]:
    """For each qubit, the seq numbers of the gates touching it, in order."""
    lines: list[list[int]] = [[] for _ in range(c.num_qubits)]
    for g in c.gates:
        for q in g.qubits:
            lines[q].append(g.seq)
    return lines
