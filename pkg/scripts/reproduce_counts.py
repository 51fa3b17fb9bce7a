"""Constraint counts of the reduced formulations over many seeded n=30 instances.

Prints mean, min and max per kind next to the analytic expectation.
"""
import argparse
from dataclasses import dataclass, field

from cliquepart.export import write_table
from cliquepart.formulations import FormulationKind, count_constraints, expected_count
from cliquepart.instances import generate


@dataclass
class CountConfig:
    families: tuple[str, ...] = ("random", "sparse")
    n: int = 30
    seeds: int = 100
    first_seed: int = 0
    kinds: tuple[str, ...] = ("MRP", "PCP", "PFRP", "FRP", "RP", "CP")
    format: str = "markdown"


def run(cfg: CountConfig) -> str:
    header = ["family", "kind", "expected", "mean", "min", "max"]
    rows = []
    for fam in cfg.families:
        insts = [generate(fam, cfg.n, s) for s in range(cfg.first_seed, cfg.first_seed + cfg.seeds)]
        for name in cfg.kinds:
            kind = FormulationKind.parse(name)
            counts = [count_constraints(inst, kind) for inst in insts]
            exp = expected_count(kind, fam, cfg.n)
            rows.append([fam, kind.value, f"{float(exp):.1f}",
                         f"{sum(counts) / len(counts):.1f}", min(counts), max(counts)])
    return write_table(header, rows, cfg.format)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=CountConfig.seeds)
    p.add_argument("--first-seed", type=int, default=CountConfig.first_seed)
    p.add_argument("--n", type=int, default=CountConfig.n)
    p.add_argument("--format", default=CountConfig.format, choices=["csv", "markdown", "json"])
    a = p.parse_args()
    print(run(CountConfig(n=a.n, seeds=a.seeds, first_seed=a.first_seed, format=a.format)), end="")


if __name__ == "__main__":
    main()
