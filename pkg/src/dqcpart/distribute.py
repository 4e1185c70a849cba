"""Lowering of partitioned circuits to distributed circuits, capacity repair, e-bit accounting."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .circuit import Circuit, Gate
from .graphs import GateGraph, Role, build_gate_graph
from .partition import Partitioning
from .qasm import circuit_from_dict, circuit_to_dict


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class LocalGate:
    gate: Gate
    qpu: int

    @property
    def step(self) -> int:
        return self.gate.seq


@dataclass(frozen=True)
class NonlocalCnot:
    """CNOT executed by gate teleportation; control on ``qpu_a``, target on ``qpu_b``."""

    gate: Gate
    qpu_a: int
    qpu_b: int

    @property
    def step(self) -> int:
        return self.gate.seq


@dataclass(frozen=True)
class Teleport:
    """State teleportation of ``qubit``, issued just before gate ``step``."""

    qubit: int
    from_qpu: int
    to_qpu: int
    step: int


Event = Union[LocalGate, NonlocalCnot, Teleport]


@dataclass(frozen=True)
class EbitLedger:
    nonlocal_cnot: int = 0
    teleport: int = 0

    @property
    def total(self) -> int:
        return self.nonlocal_cnot + self.teleport


@dataclass(frozen=True)
class QpuCaps:
    caps: tuple[int, ...]

    def __post_init__(self):
        if any(c < 1 for c in self.caps):
            raise DistributionError("every QPU cap must be >= 1")

    @classmethod
    def uniform(cls, num_qpus: int, cap: int) -> "QpuCaps":
        return cls((cap,) * num_qpus)


@dataclass(frozen=True)
class EbitReport:
    total: int
    nonlocal_cnots: int
    teleports: int
    max_qubits_per_node: int


@dataclass(frozen=True)
class DistributedCircuit:
    source: Circuit
    num_qpus: int
    initial: tuple[int, ...]
    events: tuple[Event, ...]
    ledger: EbitLedger = field(init=False)

    def __post_init__(self):
        if len(self.initial) != self.source.num_qubits:
            raise DistributionError("initial placement does not cover every qubit")
        nl = sum(isinstance(e, NonlocalCnot) for e in self.events)
        tp = sum(isinstance(e, Teleport) for e in self.events)
        object.__setattr__(self, "ledger", EbitLedger(nl, tp))

    @property
    def placement_timeline(self) -> list[list[tuple[int, int]]]:
        """Per qubit: ``[(0, initial_qpu), (step, new_qpu), ...]``."""
        tl = [[(0, q)] for q in self.initial]
        for e in self.events:
            if isinstance(e, Teleport):
                tl[e.qubit].append((e.step, e.to_qpu))
        return tl

    def gate_events(self) -> list[Event]:
        return [e for e in self.events if not isinstance(e, Teleport)]

    def to_dict(self) -> dict:
        events = []
        for e in self.events:
            if isinstance(e, Teleport):
                events.append({"type": "teleport", "step": e.step, "qubit": e.qubit,
                               "from": e.from_qpu, "to": e.to_qpu})
            elif isinstance(e, NonlocalCnot):
                events.append({"type": "nonlocal_cnot", "step": e.step,
                               "qubits": list(e.gate.qubits), "qpus": [e.qpu_a, e.qpu_b]})
            else:
                events.append({"type": "local", "step": e.step, "gate": e.gate.name,
                               "qubits": list(e.gate.qubits), "qpu": e.qpu})
        return {
            "circuit": circuit_to_dict(self.source),
            "num_qpus": self.num_qpus,
            "initial": list(self.initial),
            "placements": [[list(p) for p in tl] for tl in self.placement_timeline],
            "events": events,
            "ledger": {"total": self.ledger.total, "nonlocal_cnot": self.ledger.nonlocal_cnot,
                       "teleport": self.ledger.teleport},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DistributedCircuit":
        src = circuit_from_dict(data["circuit"])
        events: list[Event] = []
        for e in data["events"]:
            if e["type"] == "teleport":
                events.append(Teleport(e["qubit"], e["from"], e["to"], e["step"]))
            elif e["type"] == "nonlocal_cnot":
                events.append(NonlocalCnot(src.gates[e["step"]], *e["qpus"]))
            elif e["type"] == "local":
                events.append(LocalGate(src.gates[e["step"]], e["qpu"]))
            else:
                raise DistributionError(f"unknown event type {e['type']!r}")
        return cls(src, data["num_qpus"], tuple(data["initial"]), tuple(events))


def replay(d: DistributedCircuit, caps: QpuCaps | None = None) -> int:
    """Check every invariant of ``d`` by replaying it; returns peak per-QPU occupancy.

    Raises :class:`DistributionError` on co-location, ordering, or cap violations.
    """
    loc = list(d.initial)
    counts = [0] * d.num_qpus
    for q in loc:
        if not 0 <= q < d.num_qpus:
            raise DistributionError(f"placement on unknown QPU {q}")
        counts[q] += 1
    cap = caps.caps if caps else None
    if cap is not None and len(cap) != d.num_qpus:
        raise DistributionError("caps length differs from number of QPUs")

    def check_caps():
        if cap is not None:
            for j, c in enumerate(counts):
                if c > cap[j]:
                    raise DistributionError(f"QPU {j} holds {c} qubits, cap {cap[j]}")

    check_caps()
    peak = max(counts) if counts else 0
    next_seq = 0
    for e in d.events:
        if isinstance(e, Teleport):
            if loc[e.qubit] != e.from_qpu:
                raise DistributionError(f"teleport of qubit {e.qubit} from wrong QPU {e.from_qpu}")
            if e.from_qpu == e.to_qpu:
                raise DistributionError("teleport to the same QPU")
            counts[e.from_qpu] -= 1
            counts[e.to_qpu] += 1
            loc[e.qubit] = e.to_qpu
            check_caps()
            peak = max(peak, counts[e.to_qpu])
            continue
        g = e.gate
        if g.seq != next_seq or d.source.gates[g.seq] != g:
            raise DistributionError(f"gate event out of order at step {g.seq}")
        next_seq += 1
        if isinstance(e, LocalGate):
            if any(loc[q] != e.qpu for q in g.qubits):
                raise DistributionError(f"local gate {g.seq} operands not on QPU {e.qpu}")
        else:
            if not g.is_cnot:
                raise DistributionError(f"nonlocal event for one-qubit gate {g.seq}")
            if loc[g.control] != e.qpu_a or loc[g.target] != e.qpu_b or e.qpu_a == e.qpu_b:
                raise DistributionError(f"nonlocal CNOT {g.seq} placement mismatch")
    if next_seq != len(d.source):
        raise DistributionError("event stream does not cover every source gate")
    return peak


def _gate_event(g: Gate, loc: Sequence[int]) -> Event:
    if g.is_cnot and loc[g.control] != loc[g.target]:
        return NonlocalCnot(g, loc[g.control], loc[g.target])
    return LocalGate(g, loc[g.qubits[0]])


def lower_qubit_partitioning(c: Circuit, p: Partitioning) -> DistributedCircuit:
    """Static placement: qubit q lives on QPU ``p.assignment[q]`` for the whole run."""
    if len(p.assignment) != c.num_qubits:
        raise DistributionError(
            f"partitioning has {len(p.assignment)} nodes, circuit has {c.num_qubits} qubits")
    loc = p.assignment
    return DistributedCircuit(c, p.k, tuple(loc), tuple(_gate_event(g, loc) for g in c.gates))


def lower_gate_partitioning(c: Circuit, p: Partitioning,
                            graph: GateGraph | None = None) -> DistributedCircuit:
    """Each gate node runs where its partition says; wires hop with teleports.

    Qubits without any gate are parked on the least-loaded QPU.
    """
    graph = graph if graph is not None else build_gate_graph(c)
    if len(p.assignment) != graph.num_nodes:
        raise DistributionError("partitioning does not match the gate graph of this circuit")
    for (seq, q), node in graph.node_of.items():
        lab = graph.node_labels[node]
        if seq >= len(c) or lab.seq != seq or q not in c.gates[seq].qubits:
            raise DistributionError(f"gate graph node {node} does not match the circuit")
        gate = c.gates[seq]
        expected = Role.ONE_QUBIT if not gate.is_cnot else (
            Role.CONTROL if q == gate.control else Role.TARGET)
        if lab.role != expected:
            raise DistributionError(f"gate graph node {node} has the wrong role")

    a = p.assignment
    initial = [-1] * c.num_qubits
    for g in c.gates:
        for q in g.qubits:
            if initial[q] == -1:
                initial[q] = a[graph.node_of[(g.seq, q)]]
    counts = [0] * p.k
    for q in initial:
        if q >= 0:
            counts[q] += 1
    for q in range(c.num_qubits):
        if initial[q] == -1:
            j = min(range(p.k), key=lambda i: (counts[i], i))
            initial[q] = j
            counts[j] += 1

    loc = list(initial)
    events: list[Event] = []
    for g in c.gates:
        for q in g.qubits:
            want = a[graph.node_of[(g.seq, q)]]
            if loc[q] != want:
                events.append(Teleport(q, loc[q], want, g.seq))
                loc[q] = want
        events.append(_gate_event(g, loc))
    return DistributedCircuit(c, p.k, tuple(initial), tuple(events))


def _within_caps(d: DistributedCircuit, caps: QpuCaps) -> bool:
    try:
        replay(d, caps)
    except DistributionError:
        return False
    return True


class _Repair:
    """State for :func:`post_process`: the original plan plus the live placement."""

    def __init__(self, d: DistributedCircuit, caps: QpuCaps):
        self.c = d.source
        self.caps = caps.caps
        self.k = d.num_qpus
        # (seq, qubit) -> planned location / planned teleport destination
        self.plan_loc: dict[tuple[int, int], int] = {}
        self.plan_move: dict[tuple[int, int], int] = {}
        loc = list(d.initial)
        for e in d.events:
            if isinstance(e, Teleport):
                self.plan_move[(e.step, e.qubit)] = e.to_qpu
                loc[e.qubit] = e.to_qpu
            else:
                for q in e.gate.qubits:
                    self.plan_loc[(e.gate.seq, q)] = loc[q]
        self.gates_of: list[list[int]] = [[] for _ in range(self.c.num_qubits)]
        for g in self.c.gates:
            for q in g.qubits:
                self.gates_of[q].append(g.seq)
        self.loc = list(d.initial)
        self.counts = [0] * self.k
        for q in self.loc:
            self.counts[q] += 1
        self.last_used = [-1] * self.c.num_qubits

    def extra_nonlocal(self, r: int, step: int, vacated: int, dest: int) -> int:
        """Net nonlocal CNOTs added by parking ``r`` on ``dest`` instead of ``vacated``.

        Looks ahead over r's gates after ``step`` until the plan next moves r.
        """
        cost = 0
        for seq in self.gates_of[r]:
            if seq <= step:
                continue
            if (seq, r) in self.plan_move:
                break
            g = self.c.gates[seq]
            if not g.is_cnot:
                continue
            partner = g.target if g.control == r else g.control
            where = self.plan_loc[(seq, partner)]
            cost += (where == vacated) - (where == dest)
        return cost

    def free(self, j: int) -> int:
        return self.caps[j] - self.counts[j]

    def move(self, q: int, to: int, step: int, out: list[Event]) -> None:
        out.append(Teleport(q, self.loc[q], to, step))
        self.counts[self.loc[q]] -= 1
        self.counts[to] += 1
        self.loc[q] = to

    def pick_victim(self, qpu: int, step: int, protected: set[int]):
        """Cheapest qubit to push off ``qpu``; None if nothing can move."""
        others = [j for j in range(self.k) if j != qpu and self.free(j) > 0]
        if not others:
            return None
        dest = max(others, key=lambda j: (self.free(j), -j))
        cands = [r for r in range(self.c.num_qubits) if self.loc[r] == qpu and r not in protected]
        if not cands:
            return None
        victim = min(cands, key=lambda r: (self.extra_nonlocal(r, step, qpu, dest),
                                           self.last_used[r], r))
        return victim, dest


def post_process(d: DistributedCircuit, caps: QpuCaps) -> DistributedCircuit:
    """Enforce per-QPU qubit caps by chronological scan with extra evictions.

    Whenever a planned teleport would overfill its receiving QPU, the resident
    qubit whose displacement adds the fewest nonlocal CNOTs is teleported to
    the QPU with most free room. Overfull initial placements are repaired
    before the first gate at no e-bit cost. A planned teleport whose qubit is
    already at the destination is dropped.
    """
    if len(caps.caps) != d.num_qpus:
        raise DistributionError("caps length differs from number of QPUs")
    if sum(caps.caps) < d.source.num_qubits:
        raise DistributionError(
            f"caps {caps.caps} cannot hold {d.source.num_qubits} qubits")
    if _within_caps(d, caps):
        return d

    st = _Repair(d, caps)
    for j in range(st.k):
        while st.counts[j] > st.caps[j]:
            victim, dest = st.pick_victim(j, -1, set())
            st.counts[j] -= 1
            st.counts[dest] += 1
            st.loc[victim] = dest
    initial = tuple(st.loc)

    events: list[Event] = []
    for g in st.c.gates:
        for q in g.qubits:
            dest = st.plan_move.get((g.seq, q))
            if dest is None or st.loc[q] == dest:
                continue
            if st.free(dest) <= 0:
                picked = st.pick_victim(dest, g.seq, set(g.qubits))
                if picked is None:
                    continue  # stay put; the gate simply runs nonlocally
                victim, home = picked
                st.move(victim, home, g.seq, events)
            st.move(q, dest, g.seq, events)
        events.append(_gate_event(g, st.loc))
        for q in g.qubits:
            st.last_used[q] = g.seq
    return DistributedCircuit(st.c, d.num_qpus, initial, tuple(events))


def ebit_report(d: DistributedCircuit) -> EbitReport:
    return EbitReport(d.ledger.total, d.ledger.nonlocal_cnot, d.ledger.teleport, replay(d))


def single_qpu(c: Circuit) -> DistributedCircuit:
    """Everything on one QPU: the no-distribution reference point."""
    return DistributedCircuit(c, 1, (0,) * c.num_qubits,
                              tuple(LocalGate(g, 0) for g in c.gates))
