"""Constraint counts and branch-and-bound optima per reduced formulation.

The search itself does not use the constraints, so the value column checks that
every kind's scaled objective leads to the same repaired optimum.
"""
import argparse
import sys
from dataclasses import dataclass

from cliquepart.export import write_report
from cliquepart.formulations import FormulationKind
from cliquepart.instances import fuzz_instance
from cliquepart.workflows import bench_rows


@dataclass
class BenchConfig:
    families: tuple[str, ...] = ("random", "sparse", "structured", "modularity")
    n: int = 14
    seeds: int = 3
    kinds: tuple[str, ...] = ("P", "MRP", "PCP", "PFRP")
    node_limit: int = 2_000_000
    format: str = "markdown"


def run(cfg: BenchConfig) -> str:
    kinds = [FormulationKind.parse(k) for k in cfg.kinds]
    rows = []
    for fam in cfg.families:
        for s in range(cfg.seeds):
            inst = fuzz_instance(fam, cfg.n, s)
            rows += bench_rows(inst, f"{fam}_n{cfg.n}_s{s}", kinds, "bnb", node_limit=cfg.node_limit)
    return write_report(rows, cfg.format)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=BenchConfig.n)
    p.add_argument("--seeds", type=int, default=BenchConfig.seeds)
    p.add_argument("--format", default=BenchConfig.format, choices=["csv", "markdown", "json"])
    a = p.parse_args()
    sys.stdout.write(run(BenchConfig(n=a.n, seeds=a.seeds, format=a.format)))


if __name__ == "__main__":
    main()
