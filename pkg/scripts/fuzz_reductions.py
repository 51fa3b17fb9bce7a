"""Fuzz the exact-reduction claims on small instances of every family.

For each instance: FRP and P optimal sets, MRP/PCP/PFRP repair pipelines,
component properties of FRP optima and the inclusion lattice.  With
``--experimental`` the XFRP condition is also probed and counterexamples are
listed (they do not count as failures).
"""
import argparse
from dataclasses import dataclass

from cliquepart.instances import fuzz_instance
from cliquepart.workflows import default_jobs, run_parallel, verify_instance


@dataclass
class FuzzConfig:
    families: tuple[str, ...] = ("random", "sparse", "structured", "modularity")
    sizes: tuple[int, ...] = (4, 5, 6)
    per_cell: int = 200
    seed: int = 0
    experimental: bool = False
    jobs: int = 1


def _task(item):
    fam, n, seed, experimental = item
    res = verify_instance(fuzz_instance(fam, n, seed), f"{fam}/n{n}/s{seed}", experimental)
    return res.name, res.failures, res.conjecture_counterexample


def run(cfg: FuzzConfig) -> int:
    items = [
        (fam, n, cfg.seed + i, cfg.experimental)
        for fam in cfg.families for n in cfg.sizes for i in range(cfg.per_cell)
    ]
    failed = 0
    conj = 0
    for name, failures, cex in run_parallel(_task, items, cfg.jobs):
        if failures:
            failed += 1
            print(f"FAIL {name}: {failures[0]}")
        if cex:
            conj += 1
            print(f"XFRP counterexample {name}: {cex}")
    print(f"{len(items) - failed}/{len(items)} instances pass")
    if cfg.experimental:
        print(f"XFRP counterexamples: {conj}")
    return 1 if failed else 0


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--per-cell", type=int, default=FuzzConfig.per_cell)
    p.add_argument("--seed", type=int, default=FuzzConfig.seed)
    p.add_argument("--sizes", default="4,5,6")
    p.add_argument("--experimental", action="store_true")
    p.add_argument("--jobs", type=int, default=default_jobs())
    a = p.parse_args()
    cfg = FuzzConfig(sizes=tuple(int(s) for s in a.sizes.split(",")), per_cell=a.per_cell,
                     seed=a.seed, experimental=a.experimental, jobs=a.jobs)
    raise SystemExit(run(cfg))


if __name__ == "__main__":
    main()
