"""Exact solvers and the verification routines built on them.

Three independent engines:

* :func:`solve_oracle` enumerates set partitions (restricted-growth strings).
* :func:`solve_vectors` enumerates every 0-1 edge vector and filters by an
  arbitrary :class:`ConstraintSet`, so it can solve relaxations whose optima
  are not clique partitionings.
* :func:`solve_bnb` is a depth-first branch-and-bound over vertex-to-block
  assignments.
"""
from __future__ import annotations

import functools
import itertools
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .core import (
    EdgeVector,
    Partition,
    WeightedInstance,
    edges_to_components,
    is_clique_partitioning,
    iter_pairs,
    num_pairs,
    objective_value,
    pair_index,
    partition_to_edges,
    repair_to_clique_partitioning,
)
from .formulations import (
    ConstraintSet,
    FormulationKind,
    REDUCED_SCALED_KINDS,
    build_constraints,
)

ORACLE_MAX_N = 13
VECTORS_MAX_N = 7
BNB_MAX_N = 64
CUT_MAX_COMPONENT = 20

OPTIMAL = "optimal"
NODE_LIMIT = "node_limit"
TIME_LIMIT = "time_limit"

Solution = Union[EdgeVector, Partition]


class SizeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class SolveReport:
    kind: str
    optimal_value: int
    solutions: tuple[Solution, ...]
    mode: str
    explored: int
    status: str
    original_value: int | None = None
    experimental: bool = False
    elapsed: float = field(default=0.0, compare=False)

    @property
    def solution(self) -> Solution:
        return self.solutions[0]

    @property
    def value(self) -> int:
        """Objective in the original weight scale."""
        return self.optimal_value if self.original_value is None else self.original_value


def _check_mode(mode: str) -> None:
    if mode not in ("one", "all"):
        raise ValueError(f"mode must be 'one' or 'all', got {mode!r}")


def _weight_matrix(n: int, weights: Sequence[int]) -> list[list[int]]:
    mat = [[0] * n for _ in range(n)]
    for (i, j), v in zip(iter_pairs(n), weights):
        mat[i][j] = mat[j][i] = v
    return mat


# --- partition oracle -------------------------------------------------------

_RGS_CACHE_MAX_N = 12


@functools.lru_cache(maxsize=2)
def rgs_array(n: int) -> np.ndarray:
    """All restricted-growth strings of length ``n`` as rows, in lex order."""
    if n < 1:
        raise ValueError("n must be positive")
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        counts = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(len(rows)), counts)
        starts = np.cumsum(counts) - counts
        new = (np.arange(len(parent)) - np.repeat(starts, counts)).astype(np.int8)
        rows = np.hstack([rows[parent], new[:, None]])
        top = np.maximum(top[parent], new)
    rows.setflags(write=False)
    return rows


def _partition_values(rows: np.ndarray, W: list[list[int]], cols: int) -> np.ndarray:
    vals = np.zeros(len(rows), dtype=np.int64)
    for i in range(cols):
        for j in range(i + 1, cols):
            if W[i][j]:
                vals += W[i][j] * (rows[:, i] == rows[:, j])
    return vals


def solve_oracle(inst: WeightedInstance, mode: str = "one", weights: Sequence[int] | None = None) -> SolveReport:
    """Maximum within-block weight by enumerating all Bell(n) partitions."""
    _check_mode(mode)
    n = inst.n
    if n > ORACLE_MAX_N:
        raise SizeLimitError(f"partition oracle supports n <= {ORACLE_MAX_N}, got n={n}")
    t0 = time.perf_counter()
    W = _weight_matrix(n, inst.weights if weights is None else weights)
    base = min(n, _RGS_CACHE_MAX_N)
    rows = rgs_array(base)
    vals = _partition_values(rows, W, base)
    if base == n:
        best = int(vals.max())
        hits = [rows[r] for r in np.flatnonzero(vals == best)]
        explored = len(rows)
    else:
        # one more vertex: place it in each existing block or a new one
        assert n == base + 1
        top = rows.max(axis=1)
        best, explored, chunks = None, 0, []
        for c in range(base + 1):
            sel = np.flatnonzero(top >= c - 1)
            explored += len(sel)
            tot = vals[sel] + _partition_values_last(rows[sel], W[n - 1], c)
            cbest = int(tot.max())
            if best is None or cbest > best:
                best, chunks = cbest, []
            if cbest == best:
                part = rows[sel[tot == best]]
                chunks.append(np.hstack([part, np.full((len(part), 1), c, dtype=np.int8)]))
        hits = sorted(tuple(r) for chunk in chunks for r in chunk)
    sols = [Partition(n, tuple(int(v) for v in r)) for r in hits]
    sols.sort(key=lambda p: p.block_of)
    if mode == "one":
        sols = sols[:1]
    return SolveReport(
        "oracle", best, tuple(sols), mode, explored, OPTIMAL, elapsed=time.perf_counter() - t0
    )


def _partition_values_last(rows: np.ndarray, w_last: list[int], c: int) -> np.ndarray:
    gain = np.zeros(len(rows), dtype=np.int64)
    for u in range(rows.shape[1]):
        if w_last[u]:
            gain += w_last[u] * (rows[:, u] == c)
    return gain


# --- 0-1 vector brute force -------------------------------------------------

@functools.lru_cache(maxsize=4)
def _edge_bits(n: int) -> tuple[np.ndarray, ...]:
    m = num_pairs(n)
    codes = np.arange(1 << m, dtype=np.int64)
    return tuple(((codes >> e) & 1).astype(bool) for e in range(m))


def feasible_mask(cs: ConstraintSet) -> np.ndarray:
    """Boolean mask over all ``2^m`` vector codes satisfying ``cs``."""
    n = cs.n
    bits = _edge_bits(n)
    ok = np.ones(1 << num_pairs(n), dtype=bool)
    for i, j, k in cs.constraints:
        a, b, c = pair_index(i, j, n), pair_index(j, k, n), pair_index(i, k, n)
        ok &= ~(bits[a] & bits[b] & ~bits[c])
    return ok


def vector_values(n: int, weights: Sequence[int]) -> np.ndarray:
    bits = _edge_bits(n)
    vals = np.zeros(1 << num_pairs(n), dtype=np.int64)
    for e, w in enumerate(weights):
        if w:
            vals[bits[e]] += w
    return vals


def _codes_to_vectors(n: int, codes) -> tuple[EdgeVector, ...]:
    vecs = [EdgeVector.from_code(n, int(c)) for c in codes]
    vecs.sort(key=lambda x: x.bits)
    return tuple(vecs)


def solve_vectors(cs: ConstraintSet, mode: str = "one") -> SolveReport:
    """Maximize the set's objective over every 0-1 vector satisfying its constraints."""
    _check_mode(mode)
    n = cs.n
    if n > VECTORS_MAX_N:
        raise SizeLimitError(f"vector enumeration supports n <= {VECTORS_MAX_N}, got n={n}")
    t0 = time.perf_counter()
    ok = feasible_mask(cs)
    vals = vector_values(n, cs.objective_weights)
    best = int(vals[ok].max())
    codes = np.flatnonzero(ok & (vals == best))
    sols = _codes_to_vectors(n, codes)
    if mode == "one":
        sols = sols[:1]
    original = None
    if cs.is_scaled:
        original = objective_value(cs.scaled.base, sols[0])
        assert original == cs.scaled.unscale(best, sols[0].count())
    return SolveReport(
        cs.kind.value,
        best,
        sols,
        mode,
        1 << num_pairs(n),
        OPTIMAL,
        original_value=original,
        experimental=cs.experimental,
        elapsed=time.perf_counter() - t0,
    )


# --- branch and bound -------------------------------------------------------

class _LimitReached(Exception):
    pass


def _greedy_partition(W: list[list[int]]) -> tuple[list[int], int]:
    """Vertex-order greedy: join the block with the largest positive gain."""
    n = len(W)
    labels: list[int] = []
    nblocks = 0
    value = 0
    for v in range(n):
        gains = [0] * nblocks
        for u in range(v):
            gains[labels[u]] += W[v][u]
        b = max(range(nblocks), key=lambda b: (gains[b], -b), default=None)
        if b is not None and gains[b] > 0:
            labels.append(b)
            value += gains[b]
        else:
            labels.append(nblocks)
            nblocks += 1
    return labels, value


def solve_bnb(
    inst: WeightedInstance,
    node_limit: int | None = None,
    time_limit: float | None = None,
    weights: Sequence[int] | None = None,
) -> SolveReport:
    """Depth-first branch-and-bound over vertex-to-block assignments.

    Vertex ``v`` tries the existing blocks in creation order, then a new block.
    A node is pruned when its value plus the positive weight still reachable
    (pairs with an unassigned endpoint) cannot beat the incumbent.  The
    incumbent starts from a greedy assignment.  With a node limit only, the
    search (and the explored count) is deterministic.
    """
    n = inst.n
    if n > BNB_MAX_N:
        raise SizeLimitError(f"branch-and-bound supports n <= {BNB_MAX_N}, got n={n}")
    t0 = time.perf_counter()
    scaled_weights = weights
    W = _weight_matrix(n, inst.weights if weights is None else weights)
    # residual[v]: positive weight on pairs whose larger endpoint is >= v
    residual = [0] * (n + 1)
    for v in range(n - 1, -1, -1):
        residual[v] = residual[v + 1] + sum(max(0, W[v][u]) for u in range(v))

    best_labels, best_value = _greedy_partition(W)
    labels = [0] * n
    gains_buf = [[0] * (n + 1) for _ in range(n)]
    explored = 0
    deadline = None if time_limit is None else t0 + time_limit
    status = OPTIMAL

    def rec(v: int, nblocks: int, value: int) -> None:
        nonlocal explored, best_value, best_labels
        explored += 1
        if node_limit is not None and explored > node_limit:
            raise _LimitReached(NODE_LIMIT)
        if deadline is not None and explored % 1024 == 0 and time.perf_counter() > deadline:
            raise _LimitReached(TIME_LIMIT)
        if v == n:
            if value > best_value:
                best_value = value
                best_labels = labels[:]
            return
        gains = gains_buf[v]
        for b in range(nblocks + 1):
            gains[b] = 0
        Wv = W[v]
        for u in range(v):
            gains[labels[u]] += Wv[u]
        rest = residual[v + 1]
        for b in range(nblocks + 1):
            new_value = value + gains[b]
            if new_value + rest <= best_value:
                continue
            labels[v] = b
            rec(v + 1, nblocks + (b == nblocks), new_value)

    try:
        if residual[0] > best_value:
            rec(0, 0, 0)
    except _LimitReached as e:
        status = e.args[0]
        explored -= 1

    part = Partition.from_labels(best_labels)
    original = None
    if scaled_weights is not None:
        original = objective_value(inst, partition_to_edges(part))
    return SolveReport(
        "bnb",
        best_value,
        (part,),
        "one",
        explored,
        status,
        original_value=original,
        elapsed=time.perf_counter() - t0,
    )


def solve_formulation(
    inst: WeightedInstance,
    kind: FormulationKind,
    engine: str = "bnb",
    mode: str = "one",
    node_limit: int | None = None,
    time_limit: float | None = None,
) -> SolveReport:
    """Solve ``kind`` with one engine.

    ``vectors`` solves the constraint set itself; ``oracle`` and ``bnb`` search
    partitions under the kind's objective weights, which gives the optimum of
    the formulation after repair.
    """
    kind = FormulationKind(kind)
    cs = build_constraints(inst, kind)
    if engine == "vectors":
        return solve_vectors(cs, mode)
    weights = cs.objective_weights if cs.is_scaled else None
    if engine == "oracle":
        rep = solve_oracle(inst, mode, weights=weights)
    elif engine == "bnb":
        rep = solve_bnb(inst, node_limit=node_limit, time_limit=time_limit, weights=weights)
    else:
        raise ValueError(f"unknown engine {engine!r}; choose vectors, oracle or bnb")
    if weights is not None and rep.original_value is None:
        orig = objective_value(inst, partition_to_edges(rep.solution))
        rep = SolveReport(
            rep.kind, rep.optimal_value, rep.solutions, rep.mode, rep.explored,
            rep.status, original_value=orig, experimental=kind.experimental,
            elapsed=rep.elapsed,
        )
    return rep


# --- verification -----------------------------------------------------------

class Verdict(NamedTuple):
    ok: bool
    witness: EdgeVector | None = None
    detail: str = ""


def optimal_codes(cs: ConstraintSet) -> set[int]:
    return {x.code for x in solve_vectors(cs, "all").solutions}


def _original_set(inst: WeightedInstance, kind: FormulationKind) -> ConstraintSet:
    cs = build_constraints(inst, kind)
    return ConstraintSet(cs.n, cs.kind, cs.constraints, inst.weights)


def compare_optimal_sets(inst: WeightedInstance, kind: FormulationKind) -> Verdict:
    """Do ``kind`` and P have the same optimal vectors under the original weights?"""
    n = inst.n
    if n > VECTORS_MAX_N:
        raise SizeLimitError(f"optimal-set comparison supports n <= {VECTORS_MAX_N}, got n={n}")
    full = optimal_codes(_original_set(inst, FormulationKind.P))
    reduced = optimal_codes(_original_set(inst, kind))
    if full == reduced:
        return Verdict(True, None, f"{len(full)} optimal vectors")
    diff = sorted(full ^ reduced)
    witness = EdgeVector.from_code(n, diff[0])
    side = "P only" if diff[0] in full else f"{FormulationKind(kind).value} only"
    return Verdict(False, witness, f"{len(diff)} vectors differ; witness is optimal for {side}")


def verify_theorem1(inst: WeightedInstance) -> Verdict:
    """FRP has exactly the optimal vectors of the full model."""
    return compare_optimal_sets(inst, FormulationKind.FRP)


def verify_conjecture(inst: WeightedInstance) -> Verdict:
    """Optimal-set check for the unproven XFRP condition."""
    return compare_optimal_sets(inst, FormulationKind.XFRP)


@dataclass(frozen=True)
class PipelineReport:
    kind: FormulationKind
    oracle_value: int
    optima: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_reduction_pipeline(inst: WeightedInstance, kind: FormulationKind, oracle_value: int | None = None) -> PipelineReport:
    """Every optimum of ``kind`` (scaled objective), once repaired, is optimal for the CPP."""
    kind = FormulationKind(kind)
    if kind not in REDUCED_SCALED_KINDS:
        raise ValueError(f"pipeline check applies to MRP, PCP and PFRP, not {kind.value}")
    if oracle_value is None:
        oracle_value = solve_oracle(inst).optimal_value
    rep = solve_vectors(build_constraints(inst, kind), "all")
    failures = []
    for x in rep.solutions:
        fixed = repair_to_clique_partitioning(x)
        got = objective_value(inst, fixed)
        if got != oracle_value:
            failures.append(f"repaired {x.pairs()} has value {got}, oracle {oracle_value}")
        if kind is FormulationKind.PFRP and not is_clique_partitioning(x):
            failures.append(f"PFRP optimum {x.pairs()} is not a clique partitioning")
    return PipelineReport(kind, oracle_value, len(rep.solutions), tuple(failures))


@dataclass(frozen=True)
class ComponentCheck:
    vertices: tuple[int, ...]
    c1_connected: bool
    c2_min_cut: int | None
    c2_ok: bool
    c3_ok: bool
    c3_violations: tuple[tuple[int, int, int], ...]
    skipped: bool = False

    @property
    def ok(self) -> bool:
        return self.c1_connected and self.c2_ok and self.c3_ok


@dataclass(frozen=True)
class Observation1Report:
    components: tuple[ComponentCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.components)

    @property
    def skipped(self) -> int:
        return sum(c.skipped for c in self.components)


def _connected(vertices, edges) -> bool:
    if not vertices:
        return True
    adj = {v: [] for v in vertices}
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        for u in adj[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(vertices)


def min_cut_weight(vertices: Sequence[int], edges, weight) -> int | None:
    """Minimum of ``w(S, C minus S)`` over all proper cuts; None for one vertex."""
    k = len(vertices)
    if k < 2:
        return None
    local = {v: t for t, v in enumerate(vertices)}
    # S never contains vertices[0]: each cut counted once, 2^(k-1) - 1 of them
    masks = np.arange(1, 1 << (k - 1), dtype=np.int64) << 1
    total = np.zeros(masks.shape, dtype=np.int64)
    for i, j in edges:
        crossing = ((masks >> local[i]) ^ (masks >> local[j])) & 1
        total += weight(i, j) * crossing
    return int(total.min())


def verify_observation1(
    inst: WeightedInstance,
    x: EdgeVector,
    weights: Sequence[int] | None = None,
    check_optimal: bool = True,
) -> Observation1Report:
    """Check connectivity, nonnegative cuts and negative open-path sums per component.

    ``x`` should be FRP-optimal; for ``n <= 7`` this is verified unless
    ``check_optimal`` is False.
    """
    if x.n != inst.n:
        raise ValueError(f"dimension mismatch: instance n={inst.n}, vector n={x.n}")
    w_all = inst.weights if weights is None else tuple(weights)
    if check_optimal and inst.n <= VECTORS_MAX_N:
        cs = build_constraints(inst, FormulationKind.FRP)
        cs = ConstraintSet(cs.n, cs.kind, cs.constraints, w_all)
        if x.code not in optimal_codes(cs):
            raise ValueError("x is not an optimal solution of FRP")

    def w(i, j):
        return w_all[pair_index(i, j, inst.n)]

    checks = []
    for comp in edges_to_components(x):
        vs, es = comp.vertices, comp.edges
        present = set(es)
        violations = []
        for j in vs:
            for i, k in itertools.combinations(vs, 2):
                if j in (i, k):
                    continue
                if (
                    (min(i, j), max(i, j)) in present
                    and (min(j, k), max(j, k)) in present
                    and (i, k) not in present
                    and w(i, j) + w(j, k) >= 0
                ):
                    violations.append((i, j, k))
        if len(vs) > CUT_MAX_COMPONENT:
            cut, c2_ok, skipped = None, True, True
        else:
            cut = min_cut_weight(vs, es, w)
            c2_ok, skipped = cut is None or cut >= 0, False
        checks.append(
            ComponentCheck(
                vs, _connected(vs, es), cut, c2_ok, not violations,
                tuple(sorted(violations)), skipped,
            )
        )
    return Observation1Report(tuple(checks))
