import pytest
from hypothesis import given, settings

from dqcpart.circuit import Circuit, cnot, gen_tfim, one_qubit, per_qubit_timelines
from dqcpart.graphs import (
    EdgeKind,
    Role,
    WeightedGraph,
    build_gate_graph,
    build_qubit_graph,
    dump_edge_list,
    load_edge_list,
    subgraph,
)

from conftest import circuits


def test_add_edge_merges_and_validates():
    g = WeightedGraph(3)
    g.add_edge(0, 1, 2)
    g.add_edge(1, 0, 3)
    assert g.edges == {(0, 1): 5}
    with pytest.raises(ValueError):
        g.add_edge(2, 2)
    with pytest.raises(ValueError):
        g.add_edge(0, 2, 0)
    with pytest.raises(ValueError):
        g.add_edge(0, 3)


def test_qubit_graph_counts_cnots_per_pair():
    c = Circuit(3, (cnot(0, 1), cnot(1, 0), cnot(1, 2), one_qubit("h", 0)))
    g = build_qubit_graph(c)
    assert g.edges == {(0, 1): 2, (1, 2): 1}


def test_gate_graph_small_example():
    c = Circuit(2, (one_qubit("h", 0), cnot(0, 1), one_qubit("x", 1)))
    g = build_gate_graph(c)
    assert g.num_nodes == 4
    assert g.node_labels[1].role is Role.CONTROL and g.node_labels[2].role is Role.TARGET
    assert g.edges == {(0, 1): 1, (1, 2): 1, (2, 3): 1}
    assert g.edge_kinds[(1, 2)] is EdgeKind.CNOT_BOND
    assert g.edge_kinds[(0, 1)] is EdgeKind.CHRONOLOGICAL


@settings(max_examples=80, deadline=None)
@given(circuits(max_qubits=6, max_gates=40))
def test_graph_sizes(c):
    qg = build_qubit_graph(c)
    assert qg.num_nodes == c.num_qubits
    assert qg.total_weight == c.cnot_count

    gg = build_gate_graph(c)
    assert gg.num_nodes == c.one_qubit_count + 2 * c.cnot_count
    chrono = sum(max(len(t) - 1, 0) for t in per_qubit_timelines(c))
    assert gg.total_weight == c.cnot_count + chrono
    assert set(gg.edges.values()) <= {1}
    kinds = list(gg.edge_kinds.values())
    assert kinds.count(EdgeKind.CNOT_BOND) == c.cnot_count


def test_edge_list_round_trip():
    g = build_gate_graph(gen_tfim(3, 2))
    text = dump_edge_list(g)
    back = load_edge_list(text, g.num_nodes)
    assert back.edges == g.edges
    assert back.edge_kinds == g.edge_kinds
    assert dump_edge_list(back) == text


def test_edge_list_rejects_bad_rows():
    with pytest.raises(ValueError, match="line 2"):
        load_edge_list("0 1 1\n0 1\n")


def test_subgraph():
    g = build_qubit_graph(gen_tfim(5, 1))
    sub, nodes = subgraph(g, [1, 2, 4])
    assert nodes == [1, 2, 4]
    assert sub.edges == {(0, 1): 2}
