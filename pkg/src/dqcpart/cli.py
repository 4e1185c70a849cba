"""``dqcpart`` command line: partition, estimate, pareto, verify, gen.

Reports go to stdout (or ``-o``) as CSV with a leading ``# config:`` comment,
or as JSON ``{"config": ..., "rows": [...]}``. Column order is fixed by
:data:`dqcpart.pipeline.ROW_COLUMNS`, :data:`ESTIMATE_COLUMNS` and
:data:`dqcpart.pipeline.PARETO_COLUMNS`.

The default link-model file is taken from ``$DQCPART_CONFIG`` when
``--link-config`` is absent.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import pipeline
from .circuit import CircuitError
from .distribute import DistributionError
from .entanglement import FidelityError, LinkModel, estimate_total_time, load_link_model
from .partition import PartitionError
from .pipeline import PARETO_COLUMNS, ROW_COLUMNS, STRATEGIES, RunConfig
from .qasm import QasmError, dumps_json, emit_qasm
from .simulate import SimulationError, check_distributed_equivalence, verify_nonlocal_cnot, verify_state_teleportation

log = logging.getLogger("dqcpart")

CONFIG_ENV = "DQCPART_CONFIG"
VERIFY_TOL = 1e-8
VERIFY_MAX_QUBITS = 12
ESTIMATE_BASES = (0.85, 0.9)
ESTIMATE_COLUMNS = ("benchmark", "strategy", "ebits", "base_fidelity", "target_fidelity",
                    "purification_rounds", "raw_pairs_per_ebit", "per_ebit_seconds", "total_seconds")
POINTS_COLUMNS = ("benchmark", "strategy", "qubits", "cnots", "largest_partition", "ebits")

_EXPECTED = (QasmError, CircuitError, PartitionError, DistributionError, FidelityError,
             SimulationError, ValueError, KeyError, OSError)


class CliError(Exception):
    pass


def _emit(args, columns, rows, config: dict) -> None:
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        if args.format == "json":
            json.dump({"config": config, "rows": rows}, out, indent=2)
            out.write("\n")
        else:
            out.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
            w = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()


def _configs(args, default: tuple[str, ...]) -> list[RunConfig]:
    return [RunConfig(strategy=s, k=args.k, imbalance=args.imbalance,
                      capacity_fraction=args.capacity_fraction, seed=args.seed)
            for s in (args.strategy or default)]


def _config_echo(args, cfgs: list[RunConfig], **extra) -> dict:
    return {"command": args.command, "inputs": args.inputs,
            "runs": [c.to_dict() for c in cfgs], **extra}


def _cell(spec: str, cfg: RunConfig) -> pipeline.RunResult:
    r = pipeline.run(pipeline.load_circuit(spec), cfg)
    return replace(r, distributed=None)


def _run_cells(args, cfgs: list[RunConfig]) -> list[pipeline.RunResult]:
    cells = [(spec, cfg) for spec in pipeline.expand_inputs(args.inputs) for cfg in cfgs]
    jobs = getattr(args, "jobs", 1)
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_cell, *zip(*cells)))
    return [_cell(s, c) for s, c in cells]


def cmd_partition(args) -> int:
    cfgs = _configs(args, ("qubit",))
    rows = [r.row() for r in _run_cells(args, cfgs)]
    _emit(args, ROW_COLUMNS, rows, _config_echo(args, cfgs))
    return 0


def _link_model(args) -> LinkModel:
    path = args.link_config or os.environ.get(CONFIG_ENV)
    overrides = {
        "target_fidelity": args.target_fidelity,
        "attempt_period": args.attempt_period,
        "success_prob": args.success_prob,
        "classical_rtt": args.classical_rtt,
        "comm_qubits_per_node": args.comm_qubits,
    }
    if path:
        return load_link_model(path, **overrides)
    return LinkModel(**{k: v for k, v in overrides.items() if v is not None})


def cmd_estimate(args) -> int:
    cfgs = _configs(args, STRATEGIES)
    link = _link_model(args)
    bases = args.base_fidelity or list(ESTIMATE_BASES)
    rows = []
    for r in _run_cells(args, cfgs):
        for b in bases:
            t = estimate_total_time(link.with_(base_fidelity=b), r.ebits)
            rows.append({
                "benchmark": r.benchmark, "strategy": r.strategy, "ebits": r.ebits,
                "base_fidelity": b, "target_fidelity": link.target_fidelity,
                "purification_rounds": t.purification_rounds,
                "raw_pairs_per_ebit": t.raw_pairs_per_ebit,
                "per_ebit_seconds": t.per_ebit_seconds, "total_seconds": t.total_seconds,
            })
    _emit(args, ESTIMATE_COLUMNS, rows, _config_echo(args, cfgs, link=link.to_dict(), base_fidelities=bases))
    return 0


def _read_points(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        missing = set(POINTS_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise CliError(f"points file lacks columns: {', '.join(sorted(missing))}")
        return [pipeline.pareto_point(r["benchmark"], r["strategy"], int(r["qubits"]), int(r["cnots"]),
                                      int(r["largest_partition"]), int(r["ebits"]))
                for r in reader]


def cmd_pareto(args) -> int:
    cfgs = _configs(args, STRATEGIES)
    rows = [pipeline.pareto_from_result(r) for r in _run_cells(args, cfgs)] if args.inputs else []
    if args.points:
        rows += _read_points(args.points)
    if not rows:
        raise CliError("nothing to plot: give circuits and/or --points")
    _emit(args, PARETO_COLUMNS, rows, _config_echo(args, cfgs, points=args.points))
    return 0


def cmd_verify(args) -> int:
    if args.self_test:
        fn = verify_state_teleportation if args.self_test == "fig1" else verify_nonlocal_cnot
        dist = fn(trials=args.trials, seed=args.seed)
        report = {"self_test": args.self_test, "trials": args.trials, "max_distance": dist}
    else:
        if len(args.inputs) != 1:
            raise CliError("verify takes exactly one circuit (or --self-test)")
        c = pipeline.load_circuit(args.inputs[0])
        if c.num_qubits > VERIFY_MAX_QUBITS:
            raise CliError(f"{c.num_qubits} data qubits exceeds the verification limit of {VERIFY_MAX_QUBITS}")
        cfg = _configs(args, ("qubit",))
        if len(cfg) != 1:
            raise CliError("verify takes a single --strategy")
        d = pipeline.distribute(c, cfg[0])
        rep = check_distributed_equivalence(c, d, inputs=args.trials, seed=args.seed, shots=args.shots)
        report = {"config": cfg[0].to_dict(), "ebits": d.ledger.total, **rep.to_dict()}
        dist = rep.max_distance
    report["tolerance"] = VERIFY_TOL
    report["passed"] = bool(dist <= VERIFY_TOL)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if not report["passed"]:
        log.error("distributed circuit deviates by %.3g (> %g)", dist, VERIFY_TOL)
    return 0 if report["passed"] else 1


def cmd_gen(args) -> int:
    c = pipeline.load_circuit(args.spec)
    text = dumps_json(c) + "\n" if args.format == "json" else emit_qasm(c)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_run_flags(p: argparse.ArgumentParser, multi: bool = True) -> None:
    p.add_argument("--strategy", action="append", choices=STRATEGIES,
                   help="repeatable; default depends on the subcommand")
    p.add_argument("--k", type=int, default=2, help="number of QPUs (default 2)")
    p.add_argument("--imbalance", type=float, default=None,
                   help="max part size over ceil(n/k); default 1.30 (qubit) or 1.10 (gate)")
    p.add_argument("--capacity-fraction", type=float, default=0.75,
                   help="per-QPU qubit cap as a fraction of circuit width, rounded up")
    p.add_argument("--seed", type=int, default=0)
    if multi:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-o", "--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dqcpart", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    inputs_help = "bench:NAME, bench:all, bench:table1, qft:N, tfim:N:STEPS, or a .qasm/.json path"

    p = sub.add_parser("partition", help="e-bit report per circuit and strategy")
    p.add_argument("inputs", nargs="+", help=inputs_help)
    _add_run_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("estimate", help="distributed runtime under the link model")
    p.add_argument("inputs", nargs="+", help=inputs_help)
    _add_run_flags(p)
    p.add_argument("--base-fidelity", type=float, action="append",
                   help="repeatable; default 0.85 and 0.9")
    p.add_argument("--target-fidelity", type=float)
    p.add_argument("--link-config", help=f"TOML/JSON link model (default ${CONFIG_ENV})")
    p.add_argument("--attempt-period", type=float)
    p.add_argument("--success-prob", type=float)
    p.add_argument("--classical-rtt", type=float)
    p.add_argument("--comm-qubits", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("pareto", help="largest-partition fraction vs e-bit/CNOT ratio")
    p.add_argument("inputs", nargs="*", help=inputs_help)
    _add_run_flags(p)
    p.add_argument("--points", help=f"extra CSV points with columns {','.join(POINTS_COLUMNS)}")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("verify", help="statevector check of a lowered circuit")
    p.add_argument("inputs", nargs="*", help=inputs_help)
    _add_run_flags(p, multi=False)
    p.add_argument("--self-test", choices=("fig1", "fig2"),
                   help="fig1: state teleportation, fig2: nonlocal CNOT")
    p.add_argument("--trials", type=int, default=20, help="random input states")
    p.add_argument("--shots", type=int, default=1000, help="sampled branches when not enumerating")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a generated or shipped circuit")
    p.add_argument("spec", help=inputs_help)
    p.add_argument("--format", choices=("qasm", "json"), default="qasm")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except (CliError, *_EXPECTED) as exc:
        print(f"dqcpart {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
