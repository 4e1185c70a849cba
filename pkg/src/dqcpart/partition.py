"""Balanced k-way edge-cut partitioning: multilevel solver, exact oracle, random baseline."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from typing import Sequence

import numpy as np

from .graphs import WeightedGraph
from . import multilevel

BRUTE_FORCE_MAX_NODES = 20
_BRUTE_FORCE_MAX_STATES = 1 << 26
_CHUNK = 1 << 18


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class PartitionConfig:
    k: int = 2
    max_imbalance: float = 1.30
    seed: int = 0
    refinement_passes: int = 4
    # independent initial bisections tried at the coarsest level
    init_tries: int = 8

    def __post_init__(self):
        if self.k < 1:
            raise PartitionError("k must be >= 1")
        if self.max_imbalance < 1.0:
            raise PartitionError("max_imbalance must be >= 1.0")


@dataclass(frozen=True)
class Partitioning:
    assignment: tuple[int, ...]
    k: int
    cut_weight: int
    part_sizes: tuple[int, ...]
    imbalance: float

    @classmethod
    def of(cls, g: WeightedGraph, assignment: Sequence[int], k: int) -> "Partitioning":
        assignment = tuple(int(a) for a in assignment)
        if len(assignment) != g.num_nodes:
            raise PartitionError("assignment length does not match graph")
        if any(not 0 <= a < k for a in assignment):
            raise PartitionError(f"partition id outside 0..{k - 1}")
        sizes = [0] * k
        for a in assignment:
            sizes[a] += 1
        ideal = math.ceil(g.num_nodes / k) if g.num_nodes else 1
        return cls(assignment, k, g.cut_weight(assignment), tuple(sizes), max(sizes) / ideal)

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("imbalance")
        d["assignment"] = list(self.assignment)
        d["part_sizes"] = list(self.part_sizes)
        return json.dumps(d)

    @classmethod
    def from_json(cls, text: str, g: WeightedGraph) -> "Partitioning":
        d = json.loads(text)
        p = cls.of(g, d["assignment"], d["k"])
        if "cut_weight" in d and d["cut_weight"] != p.cut_weight:
            raise PartitionError(
                f"stored cut_weight {d['cut_weight']} != recomputed {p.cut_weight}")
        return p


def max_part_size(n: int, k: int, max_imbalance: float) -> int:
    """Largest admissible part: floor(max_imbalance * ceil(n/k))."""
    return int(math.floor(max_imbalance * math.ceil(n / k) + 1e-9))


def _check_feasible(n: int, k: int, max_imbalance: float) -> int:
    if n == 0:
        raise PartitionError("empty graph")
    if k > n:
        raise PartitionError(f"k={k} exceeds number of nodes {n}")
    cap = max_part_size(n, k, max_imbalance)
    if cap * k < n:
        raise PartitionError("infeasible balance constraint")
    return cap


def multilevel_partition(g: WeightedGraph, cfg: PartitionConfig = PartitionConfig()) -> Partitioning:
    """METIS-style multilevel partitioning with recursive bisection for k > 2.

    Every part ends up with between 1 and ``max_part_size(n, k, imbalance)``
    nodes; this is enforced, not just targeted.
    """
    cap = _check_feasible(g.num_nodes, cfg.k, cfg.max_imbalance)
    rng = np.random.default_rng(cfg.seed)
    assignment = multilevel.kway(
        g.adjacency(), cfg.k, cap, rng,
        passes=cfg.refinement_passes, tries=cfg.init_tries,
    )
    return Partitioning.of(g, assignment, cfg.k)


def brute_force_partition(g: WeightedGraph, k: int, max_imbalance: float = 1.0) -> Partitioning:
    """Exhaustive optimum under the same balance rule as the multilevel solver.

    Ties go to the lexicographically smallest assignment.
    """
    n = g.num_nodes
    if n > BRUTE_FORCE_MAX_NODES:
        raise PartitionError(f"brute force limited to {BRUTE_FORCE_MAX_NODES} nodes")
    cap = _check_feasible(n, k, max_imbalance)
    total = k ** n
    if total > _BRUTE_FORCE_MAX_STATES:
        raise PartitionError(f"{k}^{n} assignments is too many to enumerate")
    us, vs, ws = g.edge_arrays()
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_cut, best_code = None, None
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % k
        ok = np.ones(len(codes), dtype=bool)
        for p in range(k):
            cnt = (digits == p).sum(axis=1)
            ok &= (cnt >= 1) & (cnt <= cap)
        if not ok.any():
            continue
        cut = (ws[None, :] * (digits[:, us] != digits[:, vs])).sum(axis=1) if len(ws) else np.zeros(len(codes), dtype=np.int64)
        cut = np.where(ok, cut, np.iinfo(np.int64).max)
        i = int(np.argmin(cut))
        if ok[i] and (best_cut is None or cut[i] < best_cut):
            best_cut, best_code = int(cut[i]), int(codes[i])
    digits = [(best_code // int(p)) % k for p in powers]
    return Partitioning.of(g, digits, k)


def _balanced_sizes(n: int, k: int) -> list[int]:
    return [n // k + (1 if i < n % k else 0) for i in range(k)]


def random_assignment(n: int, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    labels = np.repeat(np.arange(k), _balanced_sizes(n, k))
    out = np.empty(n, dtype=np.int64)
    out[perm] = labels
    return out


def random_partition(g: WeightedGraph, k: int, seed: int) -> Partitioning:
    """Uniformly random assignment with the balanced ceil/floor size pattern."""
    if not 1 <= k <= max(g.num_nodes, 1):
        raise PartitionError(f"k={k} invalid for {g.num_nodes} nodes")
    return Partitioning.of(g, random_assignment(g.num_nodes, k, seed), k)


def random_cuts(g: WeightedGraph, k: int, seeds: Sequence[int], chunk: int = 4096) -> np.ndarray:
    """Cut weights of ``random_partition(g, k, s)`` for every seed, vectorised in chunks."""
    us, vs, ws = g.edge_arrays()
    out = np.zeros(len(seeds), dtype=np.int64)
    if not len(ws):
        return out
    for start in range(0, len(seeds), chunk):
        block = seeds[start:start + chunk]
        assign = np.stack([random_assignment(g.num_nodes, k, int(s)).astype(np.int8) for s in block])
        out[start:start + len(block)] = (assign[:, us] != assign[:, vs]) @ ws
    return out


def expected_random_ebits(num_qubits: int, cnot_count: int) -> int:
    """ceil(cnots * n / (2(n-1))): expected nonlocal CNOTs of a random 2-way split."""
    if num_qubits < 2:
        raise PartitionError("need at least two qubits")
    num = cnot_count * num_qubits
    den = 2 * (num_qubits - 1)
    return -(-num // den)
