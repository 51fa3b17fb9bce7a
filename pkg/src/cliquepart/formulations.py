"""Transitivity-constraint sets for the family of clique partitioning formulations.

A constraint ``(i, j, k)`` with ``i < k`` and centre ``j`` stands for
``x_ij + x_jk <= 1 + x_ik``.  Each formulation keeps a subset of the
``3 * C(n, 3)`` constraints of the full model, chosen by a sign condition on
the weights.  The "perturbed" kinds (MRP, PCP, PFRP) shift every weight down
by ``1 / (2m + 1)``; here that is done exactly by solving with the integer
weights ``(2m + 1) * w - 1`` instead.
"""
from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .core import WeightedInstance, pair_index

EXPERIMENTAL_NOTE = "experimental: correctness conjectural"


class FormulationKind(str, enum.Enum):
    P = "P"
    RP = "RP"
    MRP = "MRP"
    CP = "CP"
    PCP = "PCP"
    FRP = "FRP"
    PFRP = "PFRP"
    XFRP = "XFRP"

    @property
    def scaled(self) -> bool:
        """True if the kind is solved with the perturbed (scaled) objective."""
        return self in SCALED_KINDS

    @property
    def experimental(self) -> bool:
        return self is FormulationKind.XFRP

    @classmethod
    def parse(cls, name: str) -> "FormulationKind":
        try:
            return cls(name.upper())
        except ValueError:
            raise ValueError(
                f"unknown formulation {name!r}; choose from {', '.join(k.value for k in cls)}"
            ) from None


SCALED_KINDS = frozenset({FormulationKind.MRP, FormulationKind.PCP, FormulationKind.PFRP})
REDUCED_SCALED_KINDS = (FormulationKind.MRP, FormulationKind.PCP, FormulationKind.PFRP)


class TransitivityConstraint(NamedTuple):
    i: int
    j: int
    k: int

    def validate(self) -> "TransitivityConstraint":
        if not (self.i < self.k and self.j != self.i and self.j != self.k):
            raise ValueError(f"malformed constraint {tuple(self)}")
        return self

    def lhs_pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        i, j, k = self
        return (min(i, j), max(i, j)), (min(j, k), max(j, k))

    def rhs_pair(self) -> tuple[int, int]:
        return (self.i, self.k)

    def is_satisfied(self, x) -> bool:
        i, j, k = self
        return x.get(i, j) + x.get(j, k) <= 1 + x.get(i, k)


def total_triples(n: int) -> int:
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    return n * (n - 1) * (n - 2) // 2


def all_constraints(n: int) -> Iterator[TransitivityConstraint]:
    """Every transitivity constraint in (i, j, k)-lex order."""
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            for k in range(i + 1, n):
                if k != j:
                    yield TransitivityConstraint(i, j, k)


# The concise formulation conditions each inequality of a triple a < b < c on
# the weight of one of its left-hand-side pairs:
#   x_ab + x_bc <= 1 + x_ac  if w_bc >= 0   (centre b, condition pair bc)
#   x_ab + x_ac <= 1 + x_bc  if w_ac >= 0   (centre a, condition pair ac)
#   x_ac + x_bc <= 1 + x_ab  if w_bc >= 0   (centre c, condition pair bc)
# Conditioning the third line on w_ab (its right-hand-side pair) instead drops
# constraints some optima need; any left-hand-side choice keeps the optimal
# set (tests/test_formulations.py).
# Keyed by the centre's position in the sorted triple; values are positions of
# the condition pair.  Changing this table silently changes CP/PCP counts.
CP_CONDITION_PAIR = {1: (1, 2), 0: (0, 2), 2: (1, 2)}


def cp_condition_pair(c: TransitivityConstraint) -> tuple[int, int]:
    tri = sorted(c)
    a, b = CP_CONDITION_PAIR[tri.index(c.j)]
    return tri[a], tri[b]


@dataclass(frozen=True)
class ScaledInstance:
    """Exact perturbation ``W = (2m + 1) * w - 1`` of an instance.

    Dividing by ``2m + 1`` gives ``w - eps`` with ``eps = 1 / (2m + 1)``.  Any
    two-weight sum of ``W`` is nonzero, and since ``eps * m < 1`` every
    ``W``-optimal clique partitioning is ``w``-optimal.
    """

    base: WeightedInstance
    scaled_weights: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def factor(self) -> int:
        return 2 * self.base.m + 1

    def W(self, i: int, j: int) -> int:
        return self.scaled_weights[pair_index(i, j, self.base.n)]

    def unscale(self, scaled_value: int, edge_count: int) -> int:
        """Original objective from a scaled one: ``(V + |X|) / (2m + 1)``."""
        num = scaled_value + edge_count
        if num % self.factor:
            raise ValueError("scaled value and edge count are inconsistent")
        return num // self.factor


def perturb_scale(inst: WeightedInstance) -> ScaledInstance:
    f = 2 * inst.m + 1
    W = tuple(f * w - 1 for w in inst.weights)
    if max((abs(v) for v in W), default=0) * max(inst.m, 1) >= 2**62:
        raise OverflowError("scaled objective would exceed 64-bit range")
    for w, v in zip(inst.weights, W):
        assert (v > 0) == (w >= 1) and (v < 0) == (w <= 0)
    # pair sums: only the value of w_a + w_b matters, so check each distinct sum
    values = sorted(set(inst.weights))
    for a, b in itertools.combinations_with_replacement(values, 2):
        s = (f * a - 1) + (f * b - 1)
        assert s != 0
        assert (s > 0) == (a + b >= 1) and (s < 0) == (a + b <= 0)
    return ScaledInstance(inst, W)


def keeps(kind: FormulationKind, inst: WeightedInstance, c: TransitivityConstraint) -> bool:
    """Membership predicate of ``kind`` on original integer weights."""
    kind = FormulationKind(kind)
    i, j, k = c
    w = inst.w
    if kind is FormulationKind.P:
        return True
    if kind is FormulationKind.RP:
        return w(i, j) >= 0 or w(j, k) >= 0
    if kind is FormulationKind.MRP:
        return w(i, j) >= 1 or w(j, k) >= 1
    if kind is FormulationKind.FRP:
        return w(i, j) + w(j, k) >= 0
    if kind is FormulationKind.PFRP:
        return w(i, j) + w(j, k) >= 1
    if kind is FormulationKind.CP:
        return w(*cp_condition_pair(c)) >= 0
    if kind is FormulationKind.PCP:
        return w(*cp_condition_pair(c)) >= 1
    if kind is FormulationKind.XFRP:
        return w(i, j) + w(j, k) - w(i, k) >= 0
    raise AssertionError(kind)


def keeps_strict(kind: FormulationKind, scaled: ScaledInstance, c: TransitivityConstraint) -> bool:
    """Perturbed kinds evaluated as strict (> 0) conditions on scaled weights."""
    kind = FormulationKind(kind)
    i, j, k = c
    W = scaled.W
    if kind is FormulationKind.MRP:
        return W(i, j) > 0 or W(j, k) > 0
    if kind is FormulationKind.PFRP:
        return W(i, j) + W(j, k) > 0
    if kind is FormulationKind.PCP:
        return W(*cp_condition_pair(c)) > 0
    raise ValueError(f"{kind.value} has no strict variant")


@dataclass(frozen=True)
class ConstraintSet:
    n: int
    kind: FormulationKind
    constraints: tuple[TransitivityConstraint, ...]
    objective_weights: tuple[int, ...]
    scaled: ScaledInstance | None = None

    @property
    def is_scaled(self) -> bool:
        return self.scaled is not None

    @property
    def experimental(self) -> bool:
        return self.kind.experimental

    def __len__(self) -> int:
        return len(self.constraints)

    def as_set(self) -> frozenset[TransitivityConstraint]:
        return frozenset(self.constraints)


def _fast_filter(kind: FormulationKind, inst: WeightedInstance) -> list[TransitivityConstraint]:
    n = inst.n
    W = inst.matrix()
    P = FormulationKind
    out = []
    append = out.append
    for i in range(n):
        Wi = W[i]
        for j in range(n):
            if j == i:
                continue
            wij = Wi[j]
            Wj = W[j]
            for k in range(i + 1, n):
                if k == j:
                    continue
                wjk = Wj[k]
                if kind is P.P:
                    ok = True
                elif kind is P.RP:
                    ok = wij >= 0 or wjk >= 0
                elif kind is P.MRP:
                    ok = wij >= 1 or wjk >= 1
                elif kind is P.FRP:
                    ok = wij + wjk >= 0
                elif kind is P.PFRP:
                    ok = wij + wjk >= 1
                elif kind is P.XFRP:
                    ok = wij + wjk - Wi[k] >= 0
                else:
                    # CP_CONDITION_PAIR always lands on the pair {j, k} when i < k
                    cond = wjk
                    ok = cond >= (0 if kind is P.CP else 1)
                if ok:
                    append(TransitivityConstraint(i, j, k))
    return out


def build_constraints(inst: WeightedInstance, kind: FormulationKind) -> ConstraintSet:
    kind = FormulationKind(kind)
    total_triples(inst.n)
    constraints = tuple(_fast_filter(kind, inst))
    if kind.scaled:
        sc = perturb_scale(inst)
        return ConstraintSet(inst.n, kind, constraints, sc.scaled_weights, sc)
    return ConstraintSet(inst.n, kind, constraints, inst.weights)


@functools.lru_cache(maxsize=8)
def _triple_mask(n: int) -> np.ndarray:
    i, j, k = np.indices((n, n, n))
    return (i < k) & (j != i) & (j != k)


def count_constraints(inst: WeightedInstance, kind: FormulationKind) -> int:
    """``len(build_constraints(inst, kind))``, computed on a dense (i, j, k) grid."""
    kind = FormulationKind(kind)
    n = inst.n
    total_triples(n)
    W = np.array(inst.matrix(), dtype=np.int64)
    left = W[:, :, None]  # w_ij at [i, j, k]
    right = W[None, :, :]  # w_jk at [i, j, k]
    P = FormulationKind
    if kind is P.P:
        keep = np.ones((n, n, n), dtype=bool)
    elif kind is P.RP:
        keep = (left >= 0) | (right >= 0)
    elif kind is P.MRP:
        keep = (left >= 1) | (right >= 1)
    elif kind is P.FRP:
        keep = left + right >= 0
    elif kind is P.PFRP:
        keep = left + right >= 1
    elif kind is P.CP:
        keep = np.broadcast_to(right >= 0, (n, n, n))
    elif kind is P.PCP:
        keep = np.broadcast_to(right >= 1, (n, n, n))
    else:
        keep = left + right - W[:, None, :] >= 0
    return int(np.count_nonzero(keep & _triple_mask(n)))


# Per-pair weight distributions of the families with independent weights.
FAMILY_DISTRIBUTIONS = {
    "random": {-1: Fraction(1, 2), 1: Fraction(1, 2)},
    "sparse": {-1: Fraction(1, 3), 0: Fraction(1, 3), 1: Fraction(1, 3)},
}


def keep_probability(kind: FormulationKind, family: str) -> Fraction:
    """Probability that one constraint survives, over i.i.d. triangle weights."""
    kind = FormulationKind(kind)
    try:
        dist = FAMILY_DISTRIBUTIONS[family]
    except KeyError:
        raise ValueError(
            f"expected counts are only defined for {sorted(FAMILY_DISTRIBUTIONS)}, got {family!r}"
        ) from None
    # constraint (0, 1, 2): centre 1, pairs 01, 12 on the left and 02 on the right;
    # the outcome only depends on the three triangle weights
    c = TransitivityConstraint(0, 1, 2)
    total = Fraction(0)
    for (a, pa), (b, pb), (d, pd) in itertools.product(dist.items(), repeat=3):
        inst = WeightedInstance.from_dict(3, {(0, 1): a, (1, 2): b, (0, 2): d})
        if keeps(kind, inst, c):
            total += pa * pb * pd
    # CP conditions depend on the centre's position, but with identically
    # distributed weights every position gives the same probability
    return total


def expected_count(kind: FormulationKind, family: str, n: int) -> Fraction:
    return keep_probability(kind, family) * total_triples(n)
