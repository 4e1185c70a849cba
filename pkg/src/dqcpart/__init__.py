"""Partition quantum circuits across capacity-limited QPUs and cost the e-bits."""
from .circuit import Circuit, CircuitBuilder, CircuitError, Gate, cnot, gen_qft, gen_tfim, one_qubit
from .distribute import (
    DistributedCircuit,
    DistributionError,
    EbitReport,
    QpuCaps,
    ebit_report,
    lower_gate_partitioning,
    lower_qubit_partitioning,
    post_process,
    replay,
    single_qpu,
)
from .entanglement import (
    LinkModel,
    TimeEstimate,
    estimate_total_time,
    load_link_model,
    per_ebit_time,
    purification_plan,
    purify_once,
)
from .graphs import WeightedGraph, build_gate_graph, build_qubit_graph
from .partition import (
    PartitionConfig,
    PartitionError,
    Partitioning,
    brute_force_partition,
    expected_random_ebits,
    multilevel_partition,
    random_partition,
)
from .qasm import QasmError, emit_qasm, parse_qasm
from .simulate import (
    check_distributed_equivalence,
    verify_distributed_equivalence,
    verify_nonlocal_cnot,
    verify_state_teleportation,
)

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "CircuitError",
    "Gate",
    "cnot",
    "gen_qft",
    "gen_tfim",
    "one_qubit",
    "DistributedCircuit",
    "DistributionError",
    "EbitReport",
    "QpuCaps",
    "ebit_report",
    "lower_gate_partitioning",
    "lower_qubit_partitioning",
    "post_process",
    "replay",
    "single_qpu",
    "LinkModel",
    "TimeEstimate",
    "estimate_total_time",
    "load_link_model",
    "per_ebit_time",
    "purification_plan",
    "purify_once",
    "WeightedGraph",
    "build_gate_graph",
    "build_qubit_graph",
    "PartitionConfig",
    "PartitionError",
    "Partitioning",
    "brute_force_partition",
    "expected_random_ebits",
    "multilevel_partition",
    "random_partition",
    "QasmError",
    "emit_qasm",
    "parse_qasm",
    "check_distributed_equivalence",
    "verify_distributed_equivalence",
    "verify_nonlocal_cnot",
    "verify_state_teleportation",
]
