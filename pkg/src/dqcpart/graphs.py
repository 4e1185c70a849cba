"""Qubit-interaction and gate-dependency graphs of a circuit."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

import numpy as np

from .circuit import Circuit, per_qubit_timelines


class EdgeKind(str, Enum):
    CNOT_BOND = "bond"
    CHRONOLOGICAL = "chrono"


class Role(str, Enum):
    ONE_QUBIT = "1q"
    CONTROL = "ctrl"
    TARGET = "tgt"


@dataclass(frozen=True)
class GateNode:
    """Gate-graph node label: which gate, which half, which qubit wire."""

    seq: int
    role: Role
    qubit: int


@dataclass
class WeightedGraph:
    """Undirected graph with positive integer edge weights and no self-loops.

    Edges are keyed by ``(u, v)`` with ``u < v``. Adding an existing edge sums
    the weights, so there is never more than one edge per node pair.
    """

    num_nodes: int
    edges: dict[tuple[int, int], int] = field(default_factory=dict)
    node_labels: list[Any] | None = None
    edge_kinds: dict[tuple[int, int], EdgeKind] | None = None

    def add_edge(self, u: int, v: int, w: int = 1, kind: EdgeKind | None = None) -> None:
        if u == v:
            raise ValueError(f"self-loop on node {u}")
        if w < 1:
            raise ValueError("edge weights must be >= 1")
        if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
            raise ValueError(f"edge ({u}, {v}) out of range")
        key = (u, v) if u < v else (v, u)
        self.edges[key] = self.edges.get(key, 0) + w
        if kind is not None:
            if self.edge_kinds is None:
                self.edge_kinds = {}
            self.edge_kinds.setdefault(key, kind)

    @property
    def total_weight(self) -> int:
        return sum(self.edges.values())

    def adjacency(self) -> list[dict[int, int]]:
        adj: list[dict[int, int]] = [{} for _ in range(self.num_nodes)]
        for (u, v), w in self.edges.items():
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty
        arr = np.array([(u, v, w) for (u, v), w in self.edges.items()], dtype=np.int64)
        return arr[:, 0], arr[:, 1], arr[:, 2]

    def cut_weight(self, assignment) -> int:
        return sum(w for (u, v), w in self.edges.items() if assignment[u] != assignment[v])


def build_qubit_graph(c: Circuit) -> WeightedGraph:
    """Nodes are qubits; edge weight counts CNOTs between the pair."""
    g = WeightedGraph(c.num_qubits, node_labels=list(range(c.num_qubits)))
    for gate in c.gates:
        if gate.is_cnot:
            g.add_edge(gate.control, gate.target)
    return g


@dataclass
class GateGraph(WeightedGraph):
    """Gate-dependency graph plus lookups back into the source circuit."""

    # (seq, qubit) -> node id
    node_of: dict[tuple[int, int], int] = field(default_factory=dict)


def build_gate_graph(c: Circuit) -> GateGraph:
    """One node per one-qubit gate, two per CNOT (control and target halves).

    Halves of a CNOT are joined by a bond edge; consecutive nodes on a qubit
    wire by a chronological edge. All edges carry weight 1.
    """
    labels: list[GateNode] = []
    node_of: dict[tuple[int, int], int] = {}
    for gate in c.gates:
        if gate.is_cnot:
            for role, q in ((Role.CONTROL, gate.control), (Role.TARGET, gate.target)):
                node_of[(gate.seq, q)] = len(labels)
                labels.append(GateNode(gate.seq, role, q))
        else:
            node_of[(gate.seq, gate.target)] = len(labels)
            labels.append(GateNode(gate.seq, Role.ONE_QUBIT, gate.target))

    g = GateGraph(len(labels), node_labels=labels, edge_kinds={}, node_of=node_of)
    for gate in c.gates:
        if gate.is_cnot:
            g.add_edge(node_of[(gate.seq, gate.control)], node_of[(gate.seq, gate.target)],
                       1, EdgeKind.CNOT_BOND)
    for q, line in enumerate(per_qubit_timelines(c)):
        for a, b in zip(line, line[1:]):
            g.add_edge(node_of[(a, q)], node_of[(b, q)], 1, EdgeKind.CHRONOLOGICAL)
    return g


def dump_edge_list(g: WeightedGraph) -> str:
    """Sorted ``u v w [kind]`` lines."""
    out = []
    for (u, v) in sorted(g.edges):
        line = f"{u} {v} {g.edges[(u, v)]}"
        if g.edge_kinds and (u, v) in g.edge_kinds:
            line += f" {g.edge_kinds[(u, v)].value}"
        out.append(line)
    return "\n".join(out) + ("\n" if out else "")


def load_edge_list(text: str, num_nodes: int | None = None) -> WeightedGraph:
    rows: list[tuple[int, int, int, str | None]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        raw = raw.split("#", 1)[0].strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) not in (3, 4):
            raise ValueError(f"line {lineno}: expected 'u v w [kind]'")
        rows.append((int(parts[0]), int(parts[1]), int(parts[2]),
                     parts[3] if len(parts) == 4 else None))
    n = num_nodes if num_nodes is not None else max((max(u, v) for u, v, _, _ in rows), default=-1) + 1
    g = WeightedGraph(n)
    for u, v, w, kind in rows:
        g.add_edge(u, v, w, EdgeKind(kind) if kind else None)
    return g


def subgraph(g: WeightedGraph, nodes: Iterable[int]) -> tuple[WeightedGraph, list[int]]:
    """Induced subgraph; returns it with the local->global node map."""
    nodes = list(nodes)
    local = {v: i for i, v in enumerate(nodes)}
    sub = WeightedGraph(len(nodes))
    for (u, v), w in g.edges.items():
        if u in local and v in local:
            sub.add_edge(local[u], local[v], w)
    return sub, nodes
