"""Strategy dispatch shared by the CLI and the experiment scripts.

A strategy turns a circuit into a :class:`DistributedCircuit` (or, for the
random baseline at k=2, into the closed-form expected cost) and reports one
table row.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import benchmarks
from .circuit import Circuit, gen_qft, gen_tfim
from .distribute import (
    DistributedCircuit,
    QpuCaps,
    ebit_report,
    lower_gate_partitioning,
    lower_qubit_partitioning,
    post_process,
    single_qpu,
)
from .graphs import build_gate_graph, build_qubit_graph
from .partition import PartitionConfig, PartitionError, expected_random_ebits, multilevel_partition, random_partition
from .qasm import loads_json, parse_qasm

STRATEGIES = ("qubit", "gate", "gate+postprocess", "random", "single-qpu")
DEFAULT_IMBALANCE = {"qubit": 1.30, "gate": 1.10, "gate+postprocess": 1.10}
ROW_COLUMNS = ("benchmark", "strategy", "qubits", "cnots", "max_qubits_per_node", "ebits",
               "nonlocal_cnots", "teleports")
PARETO_COLUMNS = ("benchmark", "strategy", "qubits", "cnots", "largest_partition",
                  "max_partition_fraction", "ebits", "ebit_cnot_ratio", "advantage")
ADVANTAGE_RATIO = 0.5


def load_circuit(spec: str) -> Circuit:
    """Resolve ``bench:NAME``, ``qft:N``, ``tfim:N:STEPS`` or a ``.qasm``/``.json`` path."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "bench":
            return benchmarks.load(rest)
        if kind == "qft":
            return gen_qft(int(rest))
        if kind == "tfim":
            n, steps = rest.split(":")
            return gen_tfim(int(n), int(steps))
    except ValueError as exc:
        raise ValueError(f"bad circuit spec {spec!r}: {exc}") from None
    path = Path(spec)
    text = path.read_text()
    if path.suffix == ".json":
        return loads_json(text)
    return parse_qasm(text, name=path.stem)


def expand_inputs(specs: list[str]) -> list[str]:
    """``bench:all`` and ``bench:table1`` expand to the shipped corpus."""
    out = []
    for s in specs:
        if s == "bench:all":
            out += [f"bench:{n}" for n in benchmarks.names()]
        elif s == "bench:table1":
            out += [f"bench:{n}" for n in benchmarks.names(table1_only=True)]
        else:
            out.append(s)
    return out


@dataclass(frozen=True)
class RunConfig:
    strategy: str = "qubit"
    k: int = 2
    # None picks the per-strategy default from DEFAULT_IMBALANCE
    imbalance: float | None = None
    capacity_fraction: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; choose from {', '.join(STRATEGIES)}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0 < self.capacity_fraction <= 1:
            raise ValueError("capacity fraction must lie in (0, 1]")
        if self.imbalance is not None and self.strategy in ("random", "single-qpu"):
            raise ValueError(f"--imbalance has no effect with strategy {self.strategy}")

    @property
    def effective_imbalance(self) -> float | None:
        return self.imbalance if self.imbalance is not None else DEFAULT_IMBALANCE.get(self.strategy)

    def capacity(self, num_qubits: int) -> int:
        # round() guards against 0.75 * 8 landing a hair above 6
        return math.ceil(round(self.capacity_fraction * num_qubits, 9))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["imbalance"] = self.effective_imbalance
        return d


@dataclass(frozen=True)
class RunResult:
    benchmark: str
    strategy: str
    qubits: int
    cnots: int
    max_qubits_per_node: int
    ebits: int
    nonlocal_cnots: int
    teleports: int
    distributed: DistributedCircuit | None = field(default=None, compare=False, repr=False)

    def row(self) -> dict:
        return {c: getattr(self, c) for c in ROW_COLUMNS}


def distribute(c: Circuit, cfg: RunConfig) -> DistributedCircuit:
    """Lower ``c`` under ``cfg``. The random strategy lowers one seeded random qubit split."""
    s = cfg.strategy
    if s == "single-qpu":
        return single_qpu(c)
    if s == "random":
        return lower_qubit_partitioning(c, random_partition(build_qubit_graph(c), cfg.k, cfg.seed))
    pcfg = PartitionConfig(k=cfg.k, max_imbalance=cfg.effective_imbalance, seed=cfg.seed)
    if s == "qubit":
        return lower_qubit_partitioning(c, multilevel_partition(build_qubit_graph(c), pcfg))
    gg = build_gate_graph(c)
    d = lower_gate_partitioning(c, multilevel_partition(gg, pcfg), gg)
    if s == "gate":
        return d
    cap = cfg.capacity(c.num_qubits)
    if cap * cfg.k < c.num_qubits:
        raise PartitionError(f"{cfg.k} QPUs of {cap} qubits cannot hold {c.num_qubits} qubits")
    return post_process(d, QpuCaps.uniform(cfg.k, cap))


def run(c: Circuit, cfg: RunConfig) -> RunResult:
    if cfg.strategy == "random" and cfg.k == 2:
        e = expected_random_ebits(c.num_qubits, c.cnot_count)
        return RunResult(c.name, cfg.strategy, c.num_qubits, c.cnot_count,
                         math.ceil(c.num_qubits / 2), e, e, 0)
    d = distribute(c, cfg)
    r = ebit_report(d)
    return RunResult(c.name, cfg.strategy, c.num_qubits, c.cnot_count, r.max_qubits_per_node,
                     r.total, r.nonlocal_cnots, r.teleports, d)


def pareto_point(benchmark: str, strategy: str, qubits: int, cnots: int,
                 largest_partition: int, ebits: int) -> dict:
    """One scatter point with the advantage-region flag.

    Advantageous iff the largest partition is strictly smaller than the
    circuit and fewer than half of the CNOTs' worth of e-bits are spent.
    """
    ratio = ebits / cnots if cnots else 0.0
    return {
        "benchmark": benchmark, "strategy": strategy, "qubits": qubits, "cnots": cnots,
        "largest_partition": largest_partition,
        "max_partition_fraction": largest_partition / qubits,
        "ebits": ebits, "ebit_cnot_ratio": ratio,
        "advantage": bool(largest_partition < qubits and ratio < ADVANTAGE_RATIO),
    }


def pareto_from_result(r: RunResult) -> dict:
    return pareto_point(r.benchmark, r.strategy, r.qubits, r.cnots, r.max_qubits_per_node, r.ebits)
