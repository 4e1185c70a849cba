"""Scatter data for largest-partition fraction vs e-bit/CNOT ratio, with the advantage flag.

Runs every strategy on the benchmark corpus, sweeping the qubit-partitioning
imbalance to trace how the ratio falls as partitions are allowed to grow.

    python3 scripts/fig5_pareto.py [--out fig5.csv]
"""
import argparse
import csv
import sys

from dqcpart import benchmarks
from dqcpart.pipeline import PARETO_COLUMNS, RunConfig, pareto_from_result, run

IMBALANCES = (1.0, 1.2, 1.4, 1.6, 1.8)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out")
    args = ap.parse_args()
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(out, fieldnames=PARETO_COLUMNS + ("imbalance",), lineterminator="\n")
    w.writeheader()
    for name in benchmarks.names(table1_only=True):
        c = benchmarks.load(name)
        for s in ("random", "single-qpu", "gate", "gate+postprocess"):
            w.writerow({**pareto_from_result(run(c, RunConfig(strategy=s))), "imbalance": ""})
        for imb in IMBALANCES:
            r = run(c, RunConfig(strategy="qubit", imbalance=imb))
            w.writerow({**pareto_from_result(r), "imbalance": imb})


if __name__ == "__main__":
    main()
