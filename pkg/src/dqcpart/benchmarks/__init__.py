"""Shipped benchmark corpus (QASM files plus a manifest of qubit/CNOT counts)."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from ..circuit import Circuit
from ..qasm import parse_qasm


@lru_cache(maxsize=None)
def manifest() -> dict:
    return json.loads(resources.files(__name__).joinpath("manifest.json").read_text())


def names(table1_only: bool = False) -> list[str]:
    return [k for k, v in manifest().items() if v.get("table1") or not table1_only]


@lru_cache(maxsize=None)
def load(name: str) -> Circuit:
    try:
        entry = manifest()[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; known: {', '.join(manifest())}") from None
    text = resources.files(__name__).joinpath(entry["file"]).read_text()
    return parse_qasm(text, name=name)
