"""Graph, partition and edge-vector primitives for the clique partitioning problem.

Pairs ``{i, j}`` with ``i < j`` are addressed by a single linear index
(see :func:`pair_index`) shared by every module of the package.  All weights
are Python ints, so objective values are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

MAX_N = 64
MAX_ABS_WEIGHT = 2**20
FAMILIES = ("random", "sparse", "structured", "modularity", "custom")


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(i: int, j: int, n: int) -> int:
    """Linear index of the unordered pair {i, j} in (i, j)-lex order."""
    if i > j:
        i, j = j, i
    if i == j or i < 0 or j >= n:
        raise ValueError(f"invalid pair ({i}, {j}) for n={n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def iter_pairs(n: int) -> Iterator[tuple[int, int]]:
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j


@dataclass(frozen=True)
class WeightedInstance:
    """Complete graph on ``n`` vertices with one integer weight per pair.

    ``ground_truth`` is generator metadata (the planted partition of a
    structured instance) and is not part of the file format or of equality.
    """

    n: int
    weights: tuple[int, ...]
    family: str = "custom"
    seed: int | None = None
    ground_truth: "Partition | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise ValueError(f"n must be in [1, {MAX_N}], got {self.n}")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        w = tuple(self.weights)
        if len(w) != num_pairs(self.n):
            raise ValueError(
                f"expected {num_pairs(self.n)} weights for n={self.n}, got {len(w)}"
            )
        for v in w:
            if type(v) is not int:
                raise TypeError(f"weights must be int, got {type(v).__name__}")
            if abs(v) > MAX_ABS_WEIGHT:
                raise ValueError(f"|weight| {abs(v)} exceeds {MAX_ABS_WEIGHT}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_dict(cls, n: int, weights: dict, **kw) -> "WeightedInstance":
        """Build from ``{(i, j): w}``; missing pairs get weight 0."""
        w = [0] * num_pairs(n)
        for (i, j), v in weights.items():
            w[pair_index(i, j, n)] = v
        return cls(n, tuple(w), **kw)

    @property
    def m(self) -> int:
        return num_pairs(self.n)

    def w(self, i: int, j: int) -> int:
        return self.weights[pair_index(i, j, self.n)]

    def matrix(self) -> list[list[int]]:
        """Dense symmetric weight matrix with a zero diagonal."""
        mat = [[0] * self.n for _ in range(self.n)]
        for (i, j), v in zip(iter_pairs(self.n), self.weights):
            mat[i][j] = mat[j][i] = v
        return mat


@dataclass(frozen=True)
class EdgeVector:
    """0-1 assignment to the pair variables ``x_ij``."""

    n: int
    bits: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(v) for v in self.bits)
        if len(b) != num_pairs(self.n):
            raise ValueError(f"expected {num_pairs(self.n)} bits, got {len(b)}")
        if any(v not in (0, 1) for v in b):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", b)

    @classmethod
    def zeros(cls, n: int) -> "EdgeVector":
        return cls(n, (0,) * num_pairs(n))

    @classmethod
    def ones(cls, n: int) -> "EdgeVector":
        return cls(n, (1,) * num_pairs(n))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "EdgeVector":
        bits = [0] * num_pairs(n)
        for i, j in pairs:
            bits[pair_index(i, j, n)] = 1
        return cls(n, tuple(bits))

    @classmethod
    def from_code(cls, n: int, code: int) -> "EdgeVector":
        """Inverse of :attr:`code`: bit ``e`` of ``code`` is pair ``e``."""
        return cls(n, tuple((code >> e) & 1 for e in range(num_pairs(n))))

    @property
    def code(self) -> int:
        return sum(b << e for e, b in enumerate(self.bits))

    def get(self, i: int, j: int) -> int:
        return self.bits[pair_index(i, j, self.n)]

    def pairs(self) -> list[tuple[int, int]]:
        return [p for p, b in zip(iter_pairs(self.n), self.bits) if b]

    def count(self) -> int:
        return sum(self.bits)


@dataclass(frozen=True)
class Partition:
    """Set partition of ``range(n)`` in restricted-growth form."""

    n: int
    block_of: tuple[int, ...]

    def __post_init__(self):
        b = tuple(self.block_of)
        if len(b) != self.n:
            raise ValueError(f"expected {self.n} labels, got {len(b)}")
        top = -1
        for v in b:
            if not 0 <= v <= top + 1:
                raise ValueError(f"labels {b} are not a restricted-growth string")
            top = max(top, v)
        object.__setattr__(self, "block_of", b)

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Canonicalize arbitrary hashable labels by order of first appearance."""
        seen: dict = {}
        return cls(len(labels), tuple(seen.setdefault(v, len(seen)) for v in labels))

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        labels = [None] * n
        for b, block in enumerate(blocks):
            for v in block:
                if labels[v] is not None:
                    raise ValueError(f"vertex {v} appears in two blocks")
                labels[v] = b
        if any(v is None for v in labels):
            raise ValueError("blocks do not cover every vertex")
        return cls.from_labels(labels)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, tuple(range(n)))

    @property
    def num_blocks(self) -> int:
        return max(self.block_of, default=-1) + 1

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for v, b in enumerate(self.block_of):
            out[b].append(v)
        return out


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        vs = set(self.vertices)
        for i, j in self.edges:
            if i not in vs or j not in vs:
                raise ValueError(f"edge ({i}, {j}) leaves the component")


def _check_dims(inst: WeightedInstance, x: EdgeVector) -> None:
    if x.n != inst.n:
        raise ValueError(f"dimension mismatch: instance n={inst.n}, vector n={x.n}")


def objective_value(inst: WeightedInstance, x: EdgeVector) -> int:
    _check_dims(inst, x)
    return sum(w for w, b in zip(inst.weights, x.bits) if b)


def partition_value(inst: WeightedInstance, p: Partition) -> int:
    """Total within-block weight of ``p``."""
    return objective_value(inst, partition_to_edges(p))


def partition_to_edges(p: Partition) -> EdgeVector:
    b = p.block_of
    return EdgeVector(p.n, tuple(int(b[i] == b[j]) for i, j in iter_pairs(p.n)))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root wins so labels follow vertex order
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _component_labels(x: EdgeVector) -> Partition:
    uf = _UnionFind(x.n)
    for i, j in x.pairs():
        uf.union(i, j)
    return Partition.from_labels([uf.find(v) for v in range(x.n)])


def edges_to_components(x: EdgeVector) -> list[Component]:
    """Connected components of ``(V, X)``, sorted by smallest vertex."""
    labels = _component_labels(x)
    edges: list[list[tuple[int, int]]] = [[] for _ in range(labels.num_blocks)]
    for i, j in x.pairs():
        edges[labels.block_of[i]].append((i, j))
    return [
        Component(tuple(vs), tuple(es)) for vs, es in zip(labels.blocks(), edges)
    ]


def edges_to_partition(x: EdgeVector) -> Partition:
    """Partition into connected components (the blocks of the repaired vector)."""
    return _component_labels(x)


def is_clique_partitioning(x: EdgeVector) -> bool:
    for comp in edges_to_components(x):
        k = len(comp.vertices)
        if len(comp.edges) != k * (k - 1) // 2:
            return False
    return True


def repair_to_clique_partitioning(x: EdgeVector) -> EdgeVector:
    """Transitive closure: complete every connected component into a clique."""
    return partition_to_edges(_component_labels(x))


def cut_weight(inst: WeightedInstance, comp: Component, s_side: Iterable[int]) -> int:
    """Weight of the component edges crossing between ``s_side`` and the rest."""
    s = set(s_side)
    vs = set(comp.vertices)
    if not s or not s < vs:
        raise ValueError("s_side must be a nonempty proper subset of the component")
    return sum(inst.w(i, j) for i, j in comp.edges if (i in s) != (j in s))
