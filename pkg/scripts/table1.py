"""E-bits per benchmark for random, qubit, gate and gate+postprocess.

    python3 scripts/table1.py [--jobs N] [--out table1.csv]
"""
import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor

from dqcpart import benchmarks
from dqcpart.pipeline import ROW_COLUMNS, RunConfig, run

STRATEGIES = ("random", "qubit", "gate", "gate+postprocess")


def cell(name: str, strategy: str) -> dict:
    return run(benchmarks.load(name), RunConfig(strategy=strategy)).row()


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()
    cells = [(n, s) for s in STRATEGIES for n in benchmarks.names(table1_only=True)]
    with ProcessPoolExecutor(args.jobs) as ex:
        rows = list(ex.map(cell, *zip(*cells)))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(out, fieldnames=ROW_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)


if __name__ == "__main__":
    main()
