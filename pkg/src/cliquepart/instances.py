"""Seeded instance generators and the plain-text ``.cpp`` instance format.

Randomness comes only from :class:`SplitMix64`, so a ``(family, n, seed,
parameters)`` tuple pins an instance down to the byte on any platform.
Draw conventions (all exact, no floating point):

* ``below(b)``: uniform integer in ``[0, b)`` by rejection on the top of
  the 64-bit range (no modulo bias).
* Bernoulli(a/b): ``below(b) < a``.
* random/sparse weights are drawn in (i, j)-lex pair order.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import IO, Union

from .core import MAX_N, Partition, WeightedInstance, iter_pairs, num_pairs

MASK64 = (1 << 64) - 1
GENERATED_FAMILIES = ("random", "sparse", "structured", "modularity")


class SplitMix64:
    """splitmix64 (Steele, Lea, Flood 2014): state += golden gamma, then mix."""

    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound

    def bernoulli(self, p: Fraction) -> bool:
        return self.below(p.denominator) < p.numerator

    def choice(self, values):
        return values[self.below(len(values))]


@dataclass(frozen=True)
class GeneratorConfig:
    family: str
    n: int
    seed: int = 0
    k_clusters: int = 5
    p_in: Fraction = Fraction(3, 4)
    ba_attach: int = 2

    def __post_init__(self):
        if self.family not in GENERATED_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        p = Fraction(self.p_in)
        if not 0 <= p <= 1 or p.denominator > 100:
            raise ValueError(f"p_in must be a rational in [0, 1] with denominator <= 100, got {p}")
        object.__setattr__(self, "p_in", p)
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.family == "structured" and (
            self.k_clusters < 1 or self.n % self.k_clusters
        ):
            raise ValueError(
                f"structured instances need k_clusters dividing n (n={self.n}, k={self.k_clusters})"
            )

    def generate(self) -> WeightedInstance:
        if self.family == "random":
            return gen_random(self.n, self.seed)
        if self.family == "sparse":
            return gen_sparse(self.n, self.seed)
        if self.family == "structured":
            return gen_structured(self.n, self.k_clusters, self.p_in, self.seed)
        return gen_modularity(self.n, self.ba_attach, self.seed)


def _check_n(n: int, lo: int = 3) -> None:
    if not lo <= n <= MAX_N:
        raise ValueError(f"n must be in [{lo}, {MAX_N}], got {n}")


def gen_random(n: int, seed: int) -> WeightedInstance:
    """Weights drawn uniformly from {-1, +1}."""
    _check_n(n)
    rng = SplitMix64(seed)
    w = tuple(1 if rng.below(2) else -1 for _ in range(num_pairs(n)))
    return WeightedInstance(n, w, family="random", seed=seed)


def gen_sparse(n: int, seed: int) -> WeightedInstance:
    """Weights drawn uniformly from {-1, 0, +1}."""
    _check_n(n)
    rng = SplitMix64(seed)
    w = tuple(rng.below(3) - 1 for _ in range(num_pairs(n)))
    return WeightedInstance(n, w, family="sparse", seed=seed)


def cluster_labels(n: int, k_clusters: int) -> Partition:
    """Contiguous equal blocks ``{0..s-1}, {s..2s-1}, ...`` with ``s = n / k``."""
    if k_clusters < 1 or n % k_clusters:
        raise ValueError(f"k_clusters={k_clusters} does not divide n={n}")
    size = n // k_clusters
    return Partition(n, tuple(v // size for v in range(n)))


def gen_structured(n: int, k_clusters: int = 5, p_in=Fraction(3, 4), seed: int = 0) -> WeightedInstance:
    """Planted clusters: +1 with prob ``p_in`` inside a cluster, ``1 - p_in`` across."""
    cfg = GeneratorConfig("structured", n, seed, k_clusters=k_clusters, p_in=p_in)
    _check_n(n)
    truth = cluster_labels(n, k_clusters)
    rng = SplitMix64(seed)
    w = []
    for i, j in iter_pairs(n):
        same = truth.block_of[i] == truth.block_of[j]
        p = cfg.p_in if same else 1 - cfg.p_in
        w.append(1 if rng.bernoulli(p) else -1)
    return WeightedInstance(n, tuple(w), family="structured", seed=seed, ground_truth=truth)


def barabasi_albert_edges(n: int, ba_attach: int, rng: SplitMix64) -> list[tuple[int, int]]:
    """Preferential attachment from a seed clique on ``ba_attach + 1`` vertices.

    Each new vertex draws endpoints uniformly from the degree-weighted list of
    edge endpoints until it has ``ba_attach`` distinct targets.
    """
    if not 1 <= ba_attach < n:
        raise ValueError(f"need 1 <= ba_attach < n, got ba_attach={ba_attach}, n={n}")
    m0 = ba_attach + 1
    edges = [(i, j) for i, j in iter_pairs(m0)]
    endpoints = [v for e in edges for v in e]
    for v in range(m0, n):
        targets: list[int] = []
        while len(targets) < ba_attach:
            t = rng.choice(endpoints)
            if t not in targets:
                targets.append(t)
        for t in targets:
            edges.append((t, v))
            endpoints.extend((t, v))
    return sorted(edges)


def modularity_weights(n: int, edges: list[tuple[int, int]]) -> tuple[int, ...]:
    """Integer modularity coefficients ``2M * A_ij - d_i * d_j``."""
    deg = [0] * n
    adj = set()
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
        adj.add((min(i, j), max(i, j)))
    two_m = 2 * len(adj)
    return tuple(
        two_m * ((i, j) in adj) - deg[i] * deg[j] for i, j in iter_pairs(n)
    )


def gen_modularity(n: int, ba_attach: int = 2, seed: int = 0) -> WeightedInstance:
    _check_n(n)
    rng = SplitMix64(seed)
    edges = barabasi_albert_edges(n, ba_attach, rng)
    return WeightedInstance(n, modularity_weights(n, edges), family="modularity", seed=seed)


def generate(family: str, n: int, seed: int, **kw) -> WeightedInstance:
    return GeneratorConfig(family, n, seed, **kw).generate()


def fuzz_clusters(n: int) -> int:
    """Cluster count used when fuzzing structured instances at arbitrary n."""
    return max((d for d in range(1, 6) if n % d == 0 and d < n), default=1)


def fuzz_instance(family: str, n: int, seed: int) -> WeightedInstance:
    """One fuzzing instance; structured uses :func:`fuzz_clusters` so any n works."""
    if family == "structured":
        return gen_structured(n, fuzz_clusters(n), Fraction(3, 4), seed)
    return generate(family, n, seed)


# --- file format ------------------------------------------------------------

FORMAT_TAG = "cpp"
FORMAT_VERSION = "1"


class InstanceParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def dumps_instance(inst: WeightedInstance) -> str:
    seed = "-" if inst.seed is None else str(inst.seed)
    lines = [f"{FORMAT_TAG} {FORMAT_VERSION} {inst.n} {inst.family} {seed}"]
    lines += [f"{i} {j} {w}" for (i, j), w in zip(iter_pairs(inst.n), inst.weights)]
    return "\n".join(lines) + "\n"


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InstanceParseError(lineno, f"{what} is not an integer: {tok!r}") from None


def loads_instance(text: str) -> WeightedInstance:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise InstanceParseError(1, "empty file")
    head = lines[0].split(" ")
    if len(head) != 5 or head[0] != FORMAT_TAG:
        raise InstanceParseError(1, f"expected '{FORMAT_TAG} 1 <n> <family> <seed>'")
    if head[1] != FORMAT_VERSION:
        raise InstanceParseError(1, f"unsupported version {head[1]!r}")
    n = _parse_int(head[2], 1, "n")
    if not 1 <= n <= MAX_N:
        raise InstanceParseError(1, f"n={n} out of range")
    family = head[3]
    seed = None if head[4] == "-" else _parse_int(head[4], 1, "seed")
    expected = list(iter_pairs(n))
    if len(lines) - 1 != len(expected):
        bad = len(lines) + 1 if len(lines) - 1 < len(expected) else len(expected) + 2
        raise InstanceParseError(
            bad, f"expected {len(expected)} weight lines, found {len(lines) - 1}"
        )
    weights = []
    for lineno, (line, (i, j)) in enumerate(zip(lines[1:], expected), start=2):
        toks = line.split(" ")
        if len(toks) != 3:
            raise InstanceParseError(lineno, f"expected '<i> <j> <w>', got {line!r}")
        a, b, w = (_parse_int(t, lineno, name) for t, name in zip(toks, "ijw"))
        if (a, b) != (i, j):
            raise InstanceParseError(lineno, f"expected pair ({i}, {j}), got ({a}, {b})")
        weights.append(w)
    try:
        return WeightedInstance(n, tuple(weights), family=family, seed=seed)
    except (ValueError, TypeError) as e:
        raise InstanceParseError(1, str(e)) from None


PathOrIO = Union[str, Path, IO[str]]


def write_instance(inst: WeightedInstance, sink: PathOrIO) -> None:
    text = dumps_instance(inst)
    if isinstance(sink, (str, Path)):
        with open(sink, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sink.write(text)


def read_instance(source: PathOrIO) -> WeightedInstance:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return loads_instance(fh.read())
    return loads_instance(source.read())


def instance_bytes(inst: WeightedInstance) -> bytes:
    buf = io.StringIO()
    write_instance(inst, buf)
    return buf.getvalue().encode("ascii")
