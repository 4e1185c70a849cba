import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqcpart.entanglement import (
    FidelityError,
    LinkModel,
    estimate_total_time,
    load_link_model,
    per_ebit_time,
    purification_plan,
    purify_once,
    sample_per_ebit_time,
)


def bbpssw_reference(f):
    """Direct Werner-state recurrence, written out independently."""
    e = (1 - f) / 3
    num = f ** 2 + e ** 2
    den = f ** 2 + 2 * f * e + 5 * e ** 2
    return num / den, den


@pytest.mark.parametrize("f", [0.3, 0.5, 0.6, 0.85, 0.9, 0.99, 1.0])
def test_purify_matches_reference(f):
    assert purify_once(f) == pytest.approx(bbpssw_reference(f), rel=1e-14)


def test_purify_known_values():
    f, p = purify_once(0.85)
    assert f == pytest.approx(0.725 / 0.82, rel=1e-14)
    assert p == pytest.approx(0.82, abs=1e-12)
    assert purify_once(1.0) == (1.0, 1.0)
    # the Werner fixed point
    assert purify_once(0.5)[0] == pytest.approx(0.5)


@settings(max_examples=200)
@given(st.floats(0.501, 0.999))
def test_purify_improves_above_half(f):
    f_out, p = purify_once(f)
    assert f < f_out <= 1.0
    assert 0 < p <= 1


def test_purify_degrades_below_half():
    assert purify_once(0.4)[0] < 0.4


@pytest.mark.parametrize("f", [0.25, 0.1, 1.01, -1.0])
def test_purify_rejects_bad_fidelity(f):
    with pytest.raises(FidelityError):
        purify_once(f)


@pytest.mark.parametrize("base,target,rounds", [
    (0.9, 0.9, 0), (0.95, 0.9, 0), (0.85, 0.9, 2), (0.85, 0.88, 1), (0.7, 0.9, 6),
])
def test_purification_plan(base, target, rounds):
    plan = purification_plan(base, target)
    assert plan.rounds == rounds
    assert plan.raw_pairs == 2 ** rounds
    assert plan.final_fidelity >= target
    assert len(plan.success_probs) == rounds


def test_plan_matches_direct_iteration():
    f, r = 0.85, 0
    while f < 0.9:
        f, _ = bbpssw_reference(f)
        r += 1
    assert purification_plan(0.85, 0.9).rounds == r == 2


def test_plan_unreachable():
    with pytest.raises(FidelityError):
        purification_plan(0.5, 0.9)
    with pytest.raises(FidelityError):
        purification_plan(0.45, 0.9)


def test_per_ebit_time_formula():
    m = LinkModel(base_fidelity=0.85, comm_qubits_per_node=4)
    plan = purification_plan(0.85, 0.9)
    expected = (4 / math.prod(plan.success_probs)) * (10e-6 / 1e-3) / 2 + 2 * 500e-6
    t = per_ebit_time(m)
    assert t.per_ebit_seconds == pytest.approx(expected, rel=1e-12)
    assert t.purification_rounds == 2 and t.raw_pairs_per_ebit == 4


def test_no_purification_time():
    t = per_ebit_time(LinkModel(base_fidelity=0.9))
    assert t.per_ebit_seconds == pytest.approx(10e-6 / 1e-3)
    assert t.expected_raw_pairs == 1


def test_purification_costs_time():
    slow = per_ebit_time(LinkModel(base_fidelity=0.85, comm_qubits_per_node=4))
    fast = per_ebit_time(LinkModel(base_fidelity=0.9, comm_qubits_per_node=4))
    assert slow.per_ebit_seconds > fast.per_ebit_seconds


def test_warns_when_comm_qubits_short():
    with pytest.warns(RuntimeWarning, match="raw pairs"):
        per_ebit_time(LinkModel(base_fidelity=0.85, comm_qubits_per_node=2))


@pytest.mark.parametrize("probs", [[1e-4, 1e-3, 1e-2, 0.1, 1.0]])
def test_time_decreases_with_success_prob(probs):
    times = [per_ebit_time(LinkModel(base_fidelity=0.9, success_prob=p)).per_ebit_seconds for p in probs]
    assert all(a > b for a, b in zip(times, times[1:]))


def test_time_decreases_with_comm_qubits():
    # each slot pairs two communication qubits, so compare even counts
    times = [per_ebit_time(LinkModel(base_fidelity=0.9, comm_qubits_per_node=c)).per_ebit_seconds
             for c in (2, 4, 6, 8, 16)]
    assert all(a > b for a, b in zip(times, times[1:]))
    odd = per_ebit_time(LinkModel(base_fidelity=0.9, comm_qubits_per_node=3)).per_ebit_seconds
    assert odd == times[0]


@pytest.mark.parametrize("base", [0.85, 0.9])
def test_total_time_linear(base):
    m = LinkModel(base_fidelity=base, comm_qubits_per_node=4)
    one = per_ebit_time(m).per_ebit_seconds
    for e in (0, 1, 7, 1000, 123456):
        total = estimate_total_time(m, e).total_seconds
        assert total == pytest.approx(e * one, rel=1e-12, abs=0)
    assert estimate_total_time(m, 0).total_seconds == 0
    with pytest.raises(ValueError):
        estimate_total_time(m, -1)


@pytest.mark.parametrize("bad", [
    dict(success_prob=0), dict(success_prob=1.5), dict(attempt_period=0), dict(classical_rtt=-1),
    dict(comm_qubits_per_node=1), dict(base_fidelity=0.2),
])
def test_link_model_validation(bad):
    with pytest.raises(ValueError):
        LinkModel(**bad)


def test_load_link_model(tmp_path):
    j = tmp_path / "link.json"
    j.write_text(json.dumps({"success_prob": 0.01, "comm_qubits_per_node": 4}))
    m = load_link_model(j, base_fidelity=0.9)
    assert m.success_prob == 0.01 and m.comm_qubits_per_node == 4 and m.base_fidelity == 0.9

    t = tmp_path / "link.toml"
    t.write_text("[link]\nattempt_period = 2e-5\nclassical_rtt = 1e-3\n")
    m = load_link_model(t, success_prob=None)
    assert m.attempt_period == 2e-5 and m.classical_rtt == 1e-3 and m.success_prob == 1e-3


@pytest.mark.parametrize("base", [0.85, 0.9])
def test_monte_carlo_agrees_with_expectation(base):
    m = LinkModel(base_fidelity=base, success_prob=0.05, comm_qubits_per_node=4)
    mean, std = sample_per_ebit_time(m, samples=4000, seed=7)
    analytic = per_ebit_time(m).per_ebit_seconds
    assert abs(mean - analytic) < 4 * std / np.sqrt(4000)
