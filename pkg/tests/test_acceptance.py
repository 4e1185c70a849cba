"""Acceptance criteria, each run at its stated tolerance.

Every check prints one ``[PASS]``/``[FAIL] criterion N`` line (also collected
into the terminal summary) before asserting.
"""
import itertools
import json
import math
import time

import numpy as np
import pytest

from dqcpart import benchmarks, cli
from dqcpart.circuit import Circuit
from dqcpart.distribute import (
    LocalGate,
    NonlocalCnot,
    QpuCaps,
    Teleport,
    ebit_report,
    lower_gate_partitioning,
    lower_qubit_partitioning,
    post_process,
    replay,
)
from dqcpart.entanglement import LinkModel, estimate_total_time, per_ebit_time, purification_plan
from dqcpart.graphs import WeightedGraph, build_gate_graph, build_qubit_graph
from dqcpart.partition import (
    PartitionConfig,
    Partitioning,
    brute_force_partition,
    expected_random_ebits,
    max_part_size,
    multilevel_partition,
    random_cuts,
)
from dqcpart.pipeline import RunConfig, distribute, run
from dqcpart.simulate import check_distributed_equivalence, verify_nonlocal_cnot, verify_state_teleportation

from conftest import ACCEPTANCE_LINES, random_circuit

TABLE1 = [
    ("grover5", 5, 48, 30), ("tfim40", 7, 480, 280), ("adder9", 9, 98, 56), ("qft10", 10, 163, 91),
    ("multiplier10", 10, 216, 120), ("multiplier60", 60, 11405, 5800), ("adder63", 63, 1405, 714),
    ("qft64", 64, 5552, 2821),
]


def record(n, what, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {what}" + (f" ({detail})" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


# 1 ---------------------------------------------------------------------------

def test_c1_random_baseline_exact():
    t0 = time.perf_counter()
    got = [expected_random_ebits(n, m) for _, n, m, _ in TABLE1]
    per_call = (time.perf_counter() - t0) / len(TABLE1)
    want = [e for *_, e in TABLE1]
    rows = [run(benchmarks.load(name), RunConfig(strategy="random")) for name, *_ in TABLE1]
    maxq_ok = all(r.max_qubits_per_node == math.ceil(r.qubits / 2) for r in rows)
    ebits_ok = got == want and [r.ebits for r in rows] == want
    record(1, "closed-form random baseline", ebits_ok and maxq_ok and per_call < 1e-3,
           f"ebits {got}, max-qubits ok={maxq_ok}, {per_call * 1e6:.1f} us/call")


# 2 ---------------------------------------------------------------------------

_MC = {}


@pytest.fixture(scope="module")
def monte_carlo():
    if not _MC:
        t0 = time.perf_counter()
        for name, *_ in TABLE1:
            c = benchmarks.load(name)
            _MC[name] = (random_cuts(build_qubit_graph(c), 2, range(100_000)).mean(), c)
        _MC["_seconds"] = time.perf_counter() - t0
    return _MC


@pytest.mark.parametrize("name", [t[0] for t in TABLE1])
def test_c2_monte_carlo_consistency(monte_carlo, name):
    mean, c = monte_carlo[name]
    n = c.num_qubits
    expected = c.cnot_count * n / (2 * (n - 1))
    rel = abs(mean - expected) / expected
    record(2, f"Monte Carlo mean cut, {name}", rel <= 0.02,
           f"mean {mean:.3f} vs {expected:.3f}, rel err {rel:.4%}, tol 2%")


def test_c2_monte_carlo_runtime(monte_carlo):
    secs = monte_carlo["_seconds"]
    record(2, "Monte Carlo runtime", secs < 30, f"{secs:.1f} s for 8 x 1e5 seeds, limit 30 s")


# 3 ---------------------------------------------------------------------------

def oracle_corpus():
    """200 fixed instances: 150 at k=2 and 50 at k=3, imbalance alternating 1.0 / 1.3."""
    rng = np.random.default_rng(20231101)
    corpus = []
    for i in range(200):
        k = 2 if i < 150 else 3
        n = int(rng.integers(max(4, k), 13))
        density = rng.uniform(0.2, 0.8)
        g = WeightedGraph(n)
        for u, v in itertools.combinations(range(n), 2):
            if rng.random() < density:
                g.add_edge(u, v, int(rng.integers(1, 9)))
        corpus.append((g, k, 1.0 if i % 2 == 0 else 1.3, i))
    return corpus


def test_c3_partitioner_vs_oracle():
    t0 = time.perf_counter()
    optimal = close = violations = 0
    corpus = oracle_corpus()
    for g, k, imb, seed in corpus:
        p = multilevel_partition(g, PartitionConfig(k=k, max_imbalance=imb, seed=seed))
        best = brute_force_partition(g, k, imb).cut_weight
        cap = max_part_size(g.num_nodes, k, imb)
        if min(p.part_sizes) < 1 or max(p.part_sizes) > cap or len(p.part_sizes) != k:
            violations += 1
        optimal += p.cut_weight == best
        close += p.cut_weight <= 1.5 * best
    secs = time.perf_counter() - t0
    n = len(corpus)
    ok = optimal >= 0.6 * n and close >= 0.9 * n and violations == 0 and secs < 60
    record(3, "partitioner vs exhaustive oracle", ok,
           f"optimal {optimal}/{n}, within 1.5x {close}/{n}, violations {violations}, {secs:.1f} s")


# 4 ---------------------------------------------------------------------------

def test_c4_partitioning_beats_random():
    t0 = time.perf_counter()
    results = {}
    for name, baseline in (("tfim40", 280), ("multiplier10", 120), ("qft64", 2821)):
        r = run(benchmarks.load(name), RunConfig(strategy="qubit"))
        results[name] = (r.ebits, baseline)
    m10 = run(benchmarks.load("multiplier10"), RunConfig(strategy="qubit", imbalance=1.6))
    secs = time.perf_counter() - t0
    ok = all(e <= b for e, b in results.values()) and m10.ebits <= 60 and secs < 120
    detail = ", ".join(f"{k} {e}<={b}" for k, (e, b) in results.items())
    record(4, "qubit partitioning vs random baseline", ok,
           f"{detail}, multiplier10@1.6 {m10.ebits}<=60, {secs:.1f} s")


# 5 ---------------------------------------------------------------------------

def test_c5_fig3_accounting():
    c = benchmarks.load("fig3")
    qg = build_qubit_graph(c)
    qp = multilevel_partition(qg, PartitionConfig(max_imbalance=1.3))
    q = ebit_report(lower_qubit_partitioning(c, qp))
    gg = build_gate_graph(c)
    gp = Partitioning.of(gg, benchmarks.manifest()["fig3"]["gate_partition"], 2)
    g = ebit_report(lower_gate_partitioning(c, gp, gg))
    optimum = brute_force_partition(gg, 2, 1.0).cut_weight
    ok = q.total == 4 and (g.total, g.nonlocal_cnots, g.teleports) == (3, 2, 1) and optimum == 3
    record(5, "3-qubit example e-bit accounting", ok,
           f"qubit {q.total}, gate {g.total} = {g.nonlocal_cnots} nonlocal + {g.teleports} teleport, "
           f"gate-graph optimum {optimum}")


# 6 ---------------------------------------------------------------------------

def test_c6_teleportation_oracles():
    t0 = time.perf_counter()
    fig1 = verify_state_teleportation(100, seed=0)
    fig2 = verify_nonlocal_cnot(100, seed=0)
    secs = time.perf_counter() - t0
    record(6, "teleportation oracles", fig1 <= 1e-10 and fig2 <= 1e-10 and secs < 10,
           f"teleport infidelity {fig1:.2e}, nonlocal CNOT trace distance {fig2:.2e}, {secs:.2f} s")


# 7 ---------------------------------------------------------------------------

_C7_START = []


@pytest.mark.parametrize("name", [n for n in benchmarks.names()
                                  if benchmarks.manifest()[n]["qubits"] <= 6])
@pytest.mark.parametrize("strategy", ["qubit", "gate", "gate+postprocess"])
def test_c7_end_to_end_equivalence(name, strategy):
    if not _C7_START:
        _C7_START.append(time.perf_counter())
    c = benchmarks.load(name)
    d = distribute(c, RunConfig(strategy=strategy))
    if strategy == "gate+postprocess":
        cap = math.ceil(0.75 * c.num_qubits)
        assert replay(d, QpuCaps.uniform(2, cap)) <= cap
    rep = check_distributed_equivalence(c, d, inputs=20, seed=0)
    elapsed = time.perf_counter() - _C7_START[0]
    record(7, f"end-to-end equivalence, {name} / {strategy}",
           rep.max_distance <= 1e-8 and elapsed < 300,
           f"max distance {rep.max_distance:.2e} over {rep.branches_checked} branches "
           f"({rep.mode}), {d.ledger.total} e-bits")


# 8 ---------------------------------------------------------------------------

def independent_ledger(d):
    """Recount e-bits from scratch by walking placements."""
    loc = list(d.initial)
    nonlocal_cnots = moves = 0
    for e in d.events:
        if isinstance(e, Teleport):
            assert loc[e.qubit] != e.to_qpu
            loc[e.qubit] = e.to_qpu
            moves += 1
        else:
            g = e.gate
            if g.is_cnot and loc[g.control] != loc[g.target]:
                nonlocal_cnots += 1
                assert isinstance(e, NonlocalCnot)
            else:
                assert isinstance(e, LocalGate)
    return nonlocal_cnots, moves


def test_c8_post_process_cap_safety():
    rng = np.random.default_rng(8)
    violations = ledger_errors = repaired = 0
    for i in range(500):
        n = int(rng.integers(2, 9))
        c: Circuit = random_circuit(rng, n, int(rng.integers(1, 61)), name=f"r{i}")
        gg = build_gate_graph(c)
        if i % 2 == 0 and gg.num_nodes >= 2:
            p = multilevel_partition(gg, PartitionConfig(max_imbalance=1.1, seed=i))
        else:
            # arbitrary assignments stress the repair harder than balanced ones
            p = Partitioning.of(gg, rng.integers(2, size=gg.num_nodes), 2)
        cap = math.ceil(0.75 * n)
        before = lower_gate_partitioning(c, p, gg)
        d = post_process(before, QpuCaps.uniform(2, cap))
        repaired += d is not before
        try:
            replay(d, QpuCaps.uniform(2, cap))
        except Exception:
            violations += 1
            continue
        nl, tp = independent_ledger(d)
        if (nl, tp) != (d.ledger.nonlocal_cnot, d.ledger.teleport) or d.ledger.total != nl + tp:
            ledger_errors += 1
    record(8, "post-processing cap safety", violations == 0 and ledger_errors == 0,
           f"500 circuits, {repaired} needed repair, cap violations {violations}, "
           f"ledger mismatches {ledger_errors}")


# 9 ---------------------------------------------------------------------------

@pytest.mark.filterwarnings("ignore:nested purification needs")
def test_c9_purification_and_timing():
    no_purify = purification_plan(0.9, 0.9)
    two = purification_plan(0.85, 0.9)
    base = dict(comm_qubits_per_node=4)
    slow = per_ebit_time(LinkModel(base_fidelity=0.85, **base)).per_ebit_seconds
    fast = per_ebit_time(LinkModel(base_fidelity=0.9, **base)).per_ebit_seconds

    probs = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 0.1, 1.0]
    t_p = [per_ebit_time(LinkModel(success_prob=p, **base)).per_ebit_seconds for p in probs]
    comms = [2, 4, 6, 8, 16, 32]
    t_c = [per_ebit_time(LinkModel(comm_qubits_per_node=q)).per_ebit_seconds for q in comms]
    dec_p = all(a > b for a, b in zip(t_p, t_p[1:]))
    dec_c = all(a > b for a, b in zip(t_c, t_c[1:]))

    worst_slope = 0.0
    for b in (0.85, 0.9):
        m = LinkModel(base_fidelity=b, **base)
        one = per_ebit_time(m).per_ebit_seconds
        for e in (1, 2, 10, 1000, 10 ** 6):
            slope = estimate_total_time(m, e).total_seconds / e
            worst_slope = max(worst_slope, abs(slope - one) / one)

    ok = ((no_purify.rounds, no_purify.raw_pairs) == (0, 1) and (two.rounds, two.raw_pairs) == (2, 4)
          and slow > fast and dec_p and dec_c and worst_slope < 1e-9)
    record(9, "purification plan and timing model", ok,
           f"0.9->0.9 {no_purify.rounds} rounds/{no_purify.raw_pairs} pair, "
           f"0.85->0.9 {two.rounds} rounds/{two.raw_pairs} pairs, t(0.85)={slow:.4g}s > t(0.9)={fast:.4g}s, "
           f"monotone p={dec_p} comm={dec_c}, slope err {worst_slope:.1e}")


# 10 --------------------------------------------------------------------------

def test_c10_advantage_region(capsys, tmp_path):
    pts = tmp_path / "points.csv"
    pts.write_text("benchmark,strategy,qubits,cnots,largest_partition,ebits\n"
                   "multiplier10,qubit,10,216,8,21\n")
    code = cli.main(["pareto", "bench:table1", "--strategy", "random", "--strategy", "single-qpu",
                     "--points", str(pts), "--format", "json"])
    rows = json.loads(capsys.readouterr().out)["rows"]
    wrong = [r for r in rows
             if r["advantage"] != (r["benchmark"] == "multiplier10" and r["strategy"] == "qubit")]
    record(10, "advantage-region classification", code == 0 and not wrong and len(rows) == 17,
           f"{len(rows)} points, misclassified {len(wrong)}")
