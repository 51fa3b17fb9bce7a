"""Per-instance tasks shared by the command line and the experiment scripts."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

from .core import (
    EdgeVector,
    WeightedInstance,
    objective_value,
    partition_to_edges,
    repair_to_clique_partitioning,
)
from .export import BenchRow
from .formulations import (
    FormulationKind,
    REDUCED_SCALED_KINDS,
    build_constraints,
    count_constraints,
)
from .solvers import (
    VECTORS_MAX_N,
    solve_formulation,
    solve_oracle,
    solve_vectors,
    verify_conjecture,
    verify_observation1,
    verify_reduction_pipeline,
    verify_theorem1,
)

K = FormulationKind

# (smaller, larger): constraints(smaller) must be a subset of constraints(larger)
INCLUSIONS = (
    (K.PFRP, K.FRP),
    (K.FRP, K.RP),
    (K.RP, K.P),
    (K.MRP, K.RP),
    (K.PCP, K.CP),
    (K.CP, K.P),
)

T = TypeVar("T")
R = TypeVar("R")


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("CLIQUEPART_JOBS", "1")))
    except ValueError:
        return 1


def run_parallel(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """Map ``fn`` over ``items``; results come back in input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def check_inclusions(inst: WeightedInstance) -> list[str]:
    sets = {k: build_constraints(inst, k).as_set() for k in K}
    return [
        f"constraints({a.value}) not a subset of constraints({b.value})"
        for a, b in INCLUSIONS
        if not sets[a] <= sets[b]
    ]


@dataclass
class VerifyResult:
    name: str
    failures: list[str] = field(default_factory=list)
    conjecture_counterexample: str | None = None

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_instance(inst: WeightedInstance, name: str = "", experimental: bool = False) -> VerifyResult:
    """Every check that applies at this size; ``n`` must be at most 7."""
    res = VerifyResult(name)
    if inst.n < 3:
        return res
    if inst.n > VECTORS_MAX_N:
        res.failures.append(f"n={inst.n} exceeds the exhaustive-check limit {VECTORS_MAX_N}")
        return res
    verdict = verify_theorem1(inst)
    if not verdict.ok:
        res.failures.append(f"theorem check: {verdict.detail}; witness {verdict.witness.pairs()}")
    oracle = solve_oracle(inst).optimal_value
    for kind in REDUCED_SCALED_KINDS:
        rep = verify_reduction_pipeline(inst, kind, oracle_value=oracle)
        res.failures.extend(f"{kind.value} pipeline: {f}" for f in rep.failures)
    frp = solve_vectors(build_constraints(inst, K.FRP), "all")
    for x in frp.solutions:
        obs = verify_observation1(inst, x, check_optimal=False)
        if not obs.ok:
            res.failures.append(f"observation check failed for FRP optimum {x.pairs()}")
    res.failures.extend(check_inclusions(inst))
    if experimental:
        v = verify_conjecture(inst)
        if not v.ok:
            res.conjecture_counterexample = f"{v.detail}; witness {v.witness.pairs()}"
    return res


def count_row(inst: WeightedInstance, kinds: Iterable[FormulationKind]) -> dict[str, int]:
    return {k.value: count_constraints(inst, k) for k in kinds}


def bench_rows(
    inst: WeightedInstance,
    name: str,
    kinds: Sequence[FormulationKind],
    engine: str,
    node_limit: int | None = None,
    time_limit: float | None = None,
) -> list[BenchRow]:
    rows = []
    for kind in kinds:
        count = count_constraints(inst, kind)
        rep = solve_formulation(
            inst, kind, engine=engine, node_limit=node_limit, time_limit=time_limit
        )
        rows.append(
            BenchRow(
                instance=name,
                family=inst.family,
                n=inst.n,
                seed=inst.seed,
                kind=kind.value,
                count=count,
                solver=engine,
                status=rep.status,
                value=repaired_value(inst, rep),
                elapsed=rep.elapsed,
            )
        )
    return rows


def repaired_value(inst: WeightedInstance, rep) -> int:
    """Original-weight value of the report's first solution after repair."""
    sol = rep.solution
    x = sol if isinstance(sol, EdgeVector) else partition_to_edges(sol)
    return objective_value(inst, repair_to_clique_partitioning(x))
