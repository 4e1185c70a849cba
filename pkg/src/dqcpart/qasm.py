"""OpenQASM 2.0 subset reader/writer and the JSON circuit interchange format."""
from __future__ import annotations

import ast
import json
import logging
import math
import operator
import re

from .circuit import ONE_QUBIT_GATES, Circuit, CircuitError, Gate

log = logging.getLogger(__name__)

_ALIASES = {"U": "u3", "CX": "cx"}
_IGNORED = {"measure", "barrier", "creg"}


class QasmError(ValueError):
    """Base class for QASM diagnostics; carries a 1-based line/column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)


class QasmSyntaxError(QasmError):
    pass


class UnsupportedGateError(QasmError):
    pass


class MultipleRegistersError(QasmError):
    pass


class QubitIndexError(QasmError):
    pass


_BINOPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
}
_FUNCS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "ln": math.log, "sqrt": math.sqrt,
}


def _eval_param(expr: str) -> float:
    """Evaluate an OpenQASM parameter expression (numbers, pi, arithmetic)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(expr)

    return ev(ast.parse(expr.replace("^", "**"), mode="eval"))


def _split_args(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


_COMMENT = re.compile(r"//[^\n]*")
_GATE_STMT = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*(.*)$", re.S)
_OPERAND = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\[\s*(\d+)\s*\])?$")


def _statements(text: str):
    """Yield (statement, line, col) split on ';' with comments stripped."""
    clean = _COMMENT.sub(lambda m: " " * len(m.group()), text)
    # line numbers are tracked incrementally to stay linear in the input size
    line, line_start, scanned = 1, 0, 0

    def position(offset):
        nonlocal line, line_start, scanned
        nl = clean.count("\n", scanned, offset)
        if nl:
            line += nl
            line_start = clean.rfind("\n", scanned, offset) + 1
        scanned = offset
        return line, offset - line_start + 1

    start = 0
    for i, ch in enumerate(clean):
        if ch == ";":
            raw = clean[start:i]
            stripped = raw.lstrip()
            if stripped.strip():
                yield (stripped.strip(), *position(start + len(raw) - len(stripped)))
            start = i + 1
    tail = clean[start:]
    if tail.strip():
        ln, col = position(start + len(tail) - len(tail.lstrip()))
        raise QasmSyntaxError("missing ';' at end of statement", ln, col)


def parse_qasm(text: str, name: str = "circuit") -> Circuit:
    """Parse the supported OpenQASM 2.0 subset into a :class:`Circuit`.

    Single ``qreg`` only; ``measure``/``barrier``/``creg`` are dropped with a
    warning. One-qubit gates applied to a whole register are broadcast.
    """
    qreg: tuple[str, int] | None = None
    gates: list[Gate] = []
    dropped: dict[str, int] = {}

    for stmt, line, col in _statements(text):
        head = stmt.split(None, 1)[0] if stmt.split() else ""
        if head == "OPENQASM":
            if stmt.split()[1:] != ["2.0"]:
                raise QasmSyntaxError(f"unsupported version: {stmt!r}", line, col)
            continue
        if head == "include":
            continue
        if head in _IGNORED or head.startswith("measure"):
            key = "measure" if head.startswith("measure") else head
            dropped[key] = dropped.get(key, 0) + 1
            continue
        if head == "qreg":
            m = re.fullmatch(r"qreg\s+([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]", stmt)
            if not m:
                raise QasmSyntaxError(f"malformed qreg declaration {stmt!r}", line, col)
            if qreg is not None:
                raise MultipleRegistersError(
                    f"second quantum register {m.group(1)!r}; only one qreg is supported",
                    line, col)
            qreg = (m.group(1), int(m.group(2)))
            continue
        if head in ("gate", "opaque", "if", "reset"):
            raise UnsupportedGateError(f"unsupported statement {head!r}", line, col)

        m = _GATE_STMT.match(stmt)
        if not m or not m.group(3):
            raise QasmSyntaxError(f"cannot parse statement {stmt!r}", line, col)
        gname, pexpr, operands = m.group(1), m.group(2), m.group(3)
        gname = _ALIASES.get(gname, gname)
        if gname != "cx" and gname not in ONE_QUBIT_GATES:
            raise UnsupportedGateError(f"unsupported gate {gname!r}", line, col)
        if qreg is None:
            raise QasmSyntaxError("gate before qreg declaration", line, col)

        params: tuple[float, ...] = ()
        if pexpr is not None and pexpr.strip():
            try:
                params = tuple(_eval_param(p) for p in _split_args(pexpr))
            except (ValueError, SyntaxError, ZeroDivisionError):
                raise QasmSyntaxError(f"bad parameter expression {pexpr!r}", line, col) from None

        targets: list[list[int]] = []
        for arg in _split_args(operands):
            om = _OPERAND.match(arg)
            if not om:
                raise QasmSyntaxError(f"bad operand {arg!r}", line, col)
            if om.group(1) != qreg[0]:
                raise MultipleRegistersError(f"unknown register {om.group(1)!r}", line, col)
            if om.group(2) is None:
                targets.append(list(range(qreg[1])))
            else:
                idx = int(om.group(2))
                if idx >= qreg[1]:
                    raise QubitIndexError(
                        f"index {idx} out of range for {qreg[0]}[{qreg[1]}]", line, col)
                targets.append([idx])

        expected = 2 if gname == "cx" else 1
        if len(targets) != expected:
            raise QasmSyntaxError(
                f"{gname} expects {expected} operand(s), got {len(targets)}", line, col)
        try:
            if gname == "cx":
                if len(targets[0]) != 1 or len(targets[1]) != 1:
                    raise QasmSyntaxError("register broadcast of cx is not supported", line, col)
                gates.append(Gate("cx", (targets[0][0], targets[1][0])))
            else:
                gates.extend(Gate(gname, (q,), params) for q in targets[0])
        except CircuitError as exc:
            raise QasmSyntaxError(str(exc), line, col) from None

    for key, count in dropped.items():
        log.warning("dropped %d %s statement(s)", count, key)
    return Circuit(qreg[1] if qreg else 0, tuple(gates), name)


def emit_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.num_qubits}];"]
    for g in c.gates:
        ops = ",".join(f"q[{q}]" for q in g.qubits)
        if g.params:
            lines.append(f"{g.name}({','.join(repr(p) for p in g.params)}) {ops};")
        else:
            lines.append(f"{g.name} {ops};")
    return "\n".join(lines) + "\n"


def circuit_to_dict(c: Circuit) -> dict:
    return {
        "name": c.name,
        "num_qubits": c.num_qubits,
        "gates": [{"kind": g.name, "qubits": list(g.qubits), "params": list(g.params)}
                  for g in c.gates],
    }


def circuit_from_dict(data: dict) -> Circuit:
    gates = tuple(Gate(d["kind"], tuple(d["qubits"]), tuple(float(p) for p in d.get("params", ())))
                  for d in data["gates"])
    return Circuit(int(data["num_qubits"]), gates, data.get("name", "circuit"))


def dumps_json(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c))


def loads_json(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))
