"""Dense statevector simulation used as a semantic oracle for the lowering passes.

States are stored batched, shape ``(batch, 2, ..., 2)`` with axis ``1 + q``
holding qubit ``q``; the batch axis carries independent inputs and
measurement branches.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .distribute import (DistributedCircuit, DistributionError, LocalGate,
                         NonlocalCnot, replay)

MAX_QUBITS = 14
ENUMERATE_MAX_MEASUREMENTS = 12
NORM_TOL = 1e-10

_S2 = 1 / np.sqrt(2)
_FIXED = {
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "id": np.eye(2, dtype=complex),
}


class SimulationError(ValueError):
    pass


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s],
                     [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]])


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 unitary of a one-qubit gate."""
    if g.name in _FIXED:
        return _FIXED[g.name]
    p = g.params
    if g.name == "u3":
        return u3(*p)
    if g.name == "u2":
        return u3(np.pi / 2, p[0], p[1])
    if g.name == "u1":
        return np.diag([1, np.exp(1j * p[0])])
    if g.name == "rz":
        return np.diag([np.exp(-0.5j * p[0]), np.exp(0.5j * p[0])])
    if g.name == "rx":
        return u3(p[0], -np.pi / 2, np.pi / 2)
    if g.name == "ry":
        return u3(p[0], 0.0, 0.0)
    raise SimulationError(f"no matrix for {g.name}")


class Batch:
    """Batched pure states on ``n`` qubits."""

    def __init__(self, psi: np.ndarray):
        self.psi = psi
        self.n = psi.ndim - 1

    @classmethod
    def zeros(cls, batch: int, n: int) -> "Batch":
        if n > MAX_QUBITS:
            raise SimulationError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
        psi = np.zeros((batch,) + (2,) * n, dtype=complex)
        psi[(slice(None),) + (0,) * n] = 1.0
        return cls(psi)

    @classmethod
    def product(cls, singles: np.ndarray, extra: int = 0) -> "Batch":
        """``singles`` has shape (batch, n, 2); ``extra`` qubits appended in |0>."""
        b, n, _ = singles.shape
        if n + extra > MAX_QUBITS:
            raise SimulationError(f"{n + extra} qubits exceeds the {MAX_QUBITS}-qubit limit")
        psi = singles[:, 0, :]
        for q in range(1, n):
            psi = np.einsum("b...,bj->b...j", psi, singles[:, q, :])
        zero = np.array([1.0, 0.0], dtype=complex)
        for _ in range(extra):
            psi = np.einsum("b...,j->b...j", psi, zero)
        return cls(psi.reshape((b,) + (2,) * (n + extra)))

    def _check(self, *qubits: int) -> None:
        for q in qubits:
            if not 0 <= q < self.n:
                raise SimulationError(f"qubit {q} out of range for {self.n} qubits")

    def apply_1q(self, u: np.ndarray, q: int, mask: np.ndarray | None = None) -> None:
        self._check(q)
        ax = q + 1
        if mask is None:
            self.psi = np.moveaxis(np.tensordot(u, self.psi, axes=([1], [ax])), 0, ax)
        elif mask.any():
            sub = self.psi[mask]
            self.psi[mask] = np.moveaxis(np.tensordot(u, sub, axes=([1], [ax])), 0, ax)

    def apply_cx(self, c: int, t: int) -> None:
        self._check(c, t)
        if c == t:
            raise SimulationError("control equals target")
        idx = [slice(None)] * (self.n + 1)
        idx[c + 1] = 1
        idx = tuple(idx)
        t_ax = t + 1 if t < c else t
        self.psi[idx] = np.flip(self.psi[idx], axis=t_ax).copy()

    def apply_gate(self, g: Gate, wires=None) -> None:
        qs = g.qubits if wires is None else tuple(wires[q] for q in g.qubits)
        if g.is_cnot:
            self.apply_cx(*qs)
        else:
            self.apply_1q(gate_matrix(g), qs[0])

    def prob_one(self, q: int) -> np.ndarray:
        self._check(q)
        one = np.take(self.psi, 1, axis=q + 1)
        return (np.abs(one.reshape(len(one), -1)) ** 2).sum(axis=1)

    def measure(self, q: int, bits: np.ndarray | None = None,
                rng: np.random.Generator | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Z-basis measurement of qubit ``q`` for every batch element.

        Outcomes are forced by ``bits`` or drawn from Born probabilities with
        ``rng``. Returns ``(bits, prob_of_observed)``; post-states are renormalised.
        """
        p1 = self.prob_one(q)
        if bits is None:
            if rng is None:
                raise SimulationError("need forced bits or an rng")
            bits = (rng.random(len(p1)) < p1).astype(np.int8)
        bits = np.asarray(bits, dtype=np.int8)
        prob = np.where(bits == 1, p1, 1.0 - p1)
        keep = np.zeros_like(self.psi)
        ax = q + 1
        for b in (0, 1):
            sel = bits == b
            if sel.any():
                idx = [slice(None)] * (self.n + 1)
                idx[ax] = b
                idx = tuple(idx)
                tmp = keep[sel]
                tmp[idx] = self.psi[sel][idx]
                keep[sel] = tmp
        norm = np.sqrt(np.maximum(prob, 1e-300))
        self.psi = keep / norm.reshape((-1,) + (1,) * self.n)
        return bits, prob

    def reset_after(self, q: int, bits: np.ndarray) -> None:
        """Return a measured qubit to |0> given its outcome."""
        self.apply_1q(_FIXED["x"], q, mask=bits == 1)

    def norms(self) -> np.ndarray:
        return np.sqrt((np.abs(self.psi.reshape(len(self.psi), -1)) ** 2).sum(axis=1))


@dataclass
class StateVector:
    """A single pure state; thin wrapper over a batch of one."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.num_qubits > MAX_QUBITS:
            raise SimulationError(f"{self.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(2 ** self.num_qubits)

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        a = np.zeros(2 ** n, dtype=complex)
        a[0] = 1
        return cls(n, a)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """``basis("10")`` is |1>|0> with qubit 0 leftmost."""
        a = np.zeros(2 ** len(bits), dtype=complex)
        a[int(bits, 2)] = 1
        return cls(len(bits), a)

    def _batch(self) -> Batch:
        return Batch(self.amplitudes.reshape((1,) + (2,) * self.num_qubits).copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class MeasOutcome:
    bit: int
    post_state: StateVector
    probability: float


def apply_gate(s: StateVector, g: Gate) -> StateVector:
    b = s._batch()
    b.apply_gate(g)
    return StateVector(s.num_qubits, b.psi.reshape(-1))


def measure(s: StateVector, qubit: int, forced: int | None = None,
            rng: np.random.Generator | None = None) -> MeasOutcome:
    b = s._batch()
    bits, prob = b.measure(qubit, None if forced is None else np.array([forced]), rng)
    if prob[0] < 1e-15:
        raise SimulationError(f"outcome {forced} has zero probability")
    return MeasOutcome(int(bits[0]), StateVector(s.num_qubits, b.psi.reshape(-1)), float(prob[0]))


def simulate_circuit(c: Circuit, s: StateVector | None = None) -> StateVector:
    b = (s or StateVector.zero(c.num_qubits))._batch()
    for g in c.gates:
        b.apply_gate(g)
    return StateVector(c.num_qubits, b.psi.reshape(-1))


def pure_distance(ref: np.ndarray, out: np.ndarray) -> np.ndarray:
    """Trace distance sqrt(1 - |<ref|out>|^2) computed without cancellation.

    Rows of ``ref`` must be unit vectors. ``out`` rows may be longer than
    ``ref``: the leading block is compared and trailing amplitudes count as error.
    """
    ov = np.einsum("bi,bi->b", ref.conj(), out[:, :ref.shape[1]])
    resid = out.copy()
    resid[:, :ref.shape[1]] -= ov[:, None] * ref
    return np.linalg.norm(resid, axis=1)


def random_qubit_states(rng: np.random.Generator, shape) -> np.ndarray:
    """Haar-random single-qubit states, array of shape ``shape + (2,)``."""
    v = rng.normal(size=tuple(shape) + (2,)) + 1j * rng.normal(size=tuple(shape) + (2,))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_states(rng: np.random.Generator, batch: int, n: int) -> np.ndarray:
    v = rng.normal(size=(batch, 2 ** n)) + 1j * rng.normal(size=(batch, 2 ** n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _branches(m: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=m)), dtype=np.int8).reshape(2 ** m, m)


def bell_pair(b: Batch, a: int, c: int) -> None:
    b.apply_1q(_FIXED["h"], a)
    b.apply_cx(a, c)


def teleport_state(b: Batch, src: int, a: int, dst: int, bits=None, rng=None):
    """State teleportation of ``src`` onto ``dst`` using the pair (a, dst).

    CNOT src->a, H on src, measure src (m1) and a (m2); then X^m2 and Z^m1 on dst.
    """
    bell_pair(b, a, dst)
    b.apply_cx(src, a)
    b.apply_1q(_FIXED["h"], src)
    m1, p1 = b.measure(src, None if bits is None else bits[0], rng)
    m2, p2 = b.measure(a, None if bits is None else bits[1], rng)
    b.apply_1q(_FIXED["x"], dst, mask=m2 == 1)
    b.apply_1q(_FIXED["z"], dst, mask=m1 == 1)
    return (m1, m2), p1 * p2


def nonlocal_cnot(b: Batch, ctrl: int, a: int, c2: int, tgt: int, bits=None, rng=None):
    """CNOT ctrl->tgt by gate teleportation over the pair (a, c2).

    ctrl->a CNOT, measure a (m1), X^m1 on c2; c2->tgt CNOT, H on c2,
    measure c2 (m2), Z^m2 on ctrl.
    """
    bell_pair(b, a, c2)
    b.apply_cx(ctrl, a)
    m1, p1 = b.measure(a, None if bits is None else bits[0], rng)
    b.apply_1q(_FIXED["x"], c2, mask=m1 == 1)
    b.apply_cx(c2, tgt)
    b.apply_1q(_FIXED["h"], c2)
    m2, p2 = b.measure(c2, None if bits is None else bits[1], rng)
    b.apply_1q(_FIXED["z"], ctrl, mask=m2 == 1)
    return (m1, m2), p1 * p2


def verify_state_teleportation(trials: int = 100, seed: int = 0) -> float:
    """Max infidelity of teleported output over random inputs and all 4 branches."""
    rng = np.random.default_rng(seed)
    psi = random_qubit_states(rng, (trials,))
    br = _branches(2)
    inputs = np.repeat(psi, len(br), axis=0)
    bits = np.tile(br, (trials, 1))
    b = Batch.product(inputs[:, None, :], extra=2)
    _, prob = teleport_state(b, 0, 1, 2, bits=(bits[:, 0], bits[:, 1]))
    valid = prob > 1e-12
    idx = np.arange(len(bits))
    out = b.psi[idx, bits[:, 0], bits[:, 1], :]
    return float(pure_distance(inputs[valid], out[valid]).max() ** 2)


def verify_nonlocal_cnot(trials: int = 100, seed: int = 0) -> float:
    """Max trace distance between gate-teleported CNOT output and CNOT|in>.

    Wires: 0 = control data, 1/2 = the e-bit, 3 = target data. Inputs are
    Haar-random two-qubit states, so most are entangled.
    """
    rng = np.random.default_rng(seed)
    data = random_states(rng, trials, 2).reshape(trials, 2, 2)
    ref = data.copy()
    ref[:, 1, :] = ref[:, 1, ::-1]
    br = _branches(2)
    k = len(br)
    bits = np.tile(br, (trials, 1))
    psi = np.zeros((trials * k, 2, 2, 2, 2), dtype=complex)
    psi[:, :, 0, 0, :] = np.repeat(data, k, axis=0)
    b = Batch(psi)
    _, prob = nonlocal_cnot(b, 0, 1, 2, 3, bits=(bits[:, 0], bits[:, 1]))
    valid = prob > 1e-12
    # ancillas are in definite states after measurement: trace them out
    rho = np.einsum("baijc,bdije->bacde", b.psi, b.psi.conj()).reshape(-1, 4, 4)
    ref_flat = np.repeat(ref.reshape(trials, 4), k, axis=0)
    sigma = np.einsum("bi,bj->bij", ref_flat, ref_flat.conj())
    eig = np.linalg.eigvalsh(rho - sigma)
    dist = 0.5 * np.abs(eig).sum(axis=1)
    return float(dist[valid].max())


@dataclass
class VerificationReport:
    circuit: str
    max_distance: float
    branches_checked: int
    mode: str
    # input index and measurement bits of the branch attaining max_distance
    worst_input: int = -1
    worst_branch: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {"circuit": self.circuit, "max_distance": self.max_distance,
                "branches_checked": self.branches_checked, "mode": self.mode,
                "worst_input": self.worst_input, "worst_branch": list(self.worst_branch)}


def check_distributed_equivalence(c: Circuit, d: DistributedCircuit, inputs: int = 20,
                                  seed: int = 0, shots: int = 1000) -> VerificationReport:
    """Simulate ``d`` with ideal e-bits and two reusable communication qubits.

    Every nonlocal CNOT and teleport measures two qubits; with at most
    ``ENUMERATE_MAX_MEASUREMENTS`` measurements all branches are enumerated,
    otherwise ``shots`` branches per input are sampled from Born statistics.
    """
    n = c.num_qubits
    if n + 2 > MAX_QUBITS:
        raise SimulationError(f"{n} data qubits + 2 ancillas exceeds {MAX_QUBITS}")
    if not c.same_gates(d.source, digits=15):
        raise SimulationError("distributed circuit was not lowered from this circuit")
    try:
        replay(d)
    except DistributionError as exc:
        raise SimulationError(f"malformed event stream: {exc}") from None

    n_meas = 2 * d.ledger.total
    enumerate_all = n_meas <= ENUMERATE_MAX_MEASUREMENTS
    branch_bits = _branches(n_meas) if enumerate_all else None
    per_input = len(branch_bits) if enumerate_all else shots
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_at: tuple[int, tuple[int, ...]] = (-1, ())
    checked = 0

    for trial in range(inputs):
        singles = random_qubit_states(rng, (1, n))
        ref = Batch.product(singles)
        for g in c.gates:
            ref.apply_gate(g)
        ref_vec = ref.psi.reshape(1, -1)

        b = Batch.product(np.repeat(singles, per_input, axis=0), extra=2)
        wires = list(range(n))
        free = [n, n + 1]
        col = 0
        valid = np.ones(per_input, dtype=bool)
        seen = np.zeros((per_input, n_meas), dtype=np.int8)

        def forced(k):
            return None if branch_bits is None else (branch_bits[:, k], branch_bits[:, k + 1])

        for e in d.events:
            if isinstance(e, LocalGate):
                b.apply_gate(e.gate, wires)
            elif isinstance(e, NonlocalCnot):
                a, c2 = free
                ms, p = nonlocal_cnot(b, wires[e.gate.control], a, c2, wires[e.gate.target],
                                      bits=forced(col), rng=rng)
                b.reset_after(a, ms[0])
                b.reset_after(c2, ms[1])
                seen[:, col], seen[:, col + 1] = ms
                valid &= p > 1e-12
                col += 2
            else:
                a, dst = free
                src = wires[e.qubit]
                ms, p = teleport_state(b, src, a, dst, bits=forced(col), rng=rng)
                b.reset_after(src, ms[0])
                b.reset_after(a, ms[1])
                wires[e.qubit] = dst
                free = [src, a]
                seen[:, col], seen[:, col + 1] = ms
                valid &= p > 1e-12
                col += 2
        norms = b.norms()
        if np.abs(norms - 1).max() > NORM_TOL:
            raise SimulationError("norm drift beyond tolerance")
        # ancilla axes first so the |00> block is the leading 2**n amplitudes
        order = [f + 1 for f in free] + [w + 1 for w in wires]
        out = np.transpose(b.psi, [0] + order).reshape(per_input, -1)
        dist = pure_distance(np.repeat(ref_vec, per_input, axis=0), out)
        dist = np.where(valid, dist, 0.0)
        i = int(np.argmax(dist))
        if dist[i] > worst or worst_at[0] < 0:
            worst, worst_at = float(dist[i]), (trial, tuple(int(x) for x in seen[i]))
        checked += int(valid.sum())
    return VerificationReport(c.name, worst, checked, "enumerated" if enumerate_all else "sampled",
                              *worst_at)


def verify_distributed_equivalence(c: Circuit, d: DistributedCircuit, inputs: int = 20,
                                   seed: int = 0, shots: int = 1000) -> float:
    return check_distributed_equivalence(c, d, inputs, seed, shots).max_distance
