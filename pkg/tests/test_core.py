import itertools

import pytest
from hypothesis import given, strategies as st

from cliquepart.core import (
    Component,
    EdgeVector,
    Partition,
    WeightedInstance,
    cut_weight,
    edges_to_components,
    edges_to_partition,
    is_clique_partitioning,
    iter_pairs,
    num_pairs,
    objective_value,
    pair_index,
    partition_to_edges,
    repair_to_clique_partitioning,
)
from cliquepart.formulations import all_constraints
from cliquepart.solvers import rgs_array

from conftest import edge_vectors, instances


def test_pair_index_is_lex_position():
    for n in range(2, 9):
        assert [pair_index(i, j, n) for i, j in iter_pairs(n)] == list(range(num_pairs(n)))
        assert all(pair_index(j, i, n) == pair_index(i, j, n) for i, j in iter_pairs(n))


def test_pair_index_rejects_loops():
    with pytest.raises(ValueError):
        pair_index(2, 2, 4)


def test_instance_validation():
    with pytest.raises(ValueError):
        WeightedInstance(3, (1, 1))
    with pytest.raises(TypeError):
        WeightedInstance(3, (1, 1, 0.5))
    with pytest.raises(ValueError):
        WeightedInstance(3, (1, 1, 2**20 + 1))
    with pytest.raises(ValueError):
        WeightedInstance(65, (0,) * num_pairs(65))


def test_objective_examples(triangle):
    assert objective_value(triangle, EdgeVector.zeros(3)) == 0
    assert objective_value(triangle, EdgeVector.ones(3)) == 1
    assert objective_value(triangle, EdgeVector.from_pairs(3, [(0, 1)])) == 1


def test_objective_dimension_mismatch(triangle):
    with pytest.raises(ValueError, match="mismatch"):
        objective_value(triangle, EdgeVector.zeros(4))


def test_partition_to_edges_examples():
    assert partition_to_edges(Partition.singletons(4)) == EdgeVector.zeros(4)
    assert partition_to_edges(Partition(4, (0, 0, 0, 0))) == EdgeVector.ones(4)
    x = partition_to_edges(Partition.from_blocks(4, [[0, 1], [2, 3]]))
    assert x.pairs() == [(0, 1), (2, 3)]


def test_partition_canonical_form():
    assert Partition.from_labels("bbab").block_of == (0, 0, 1, 0)
    with pytest.raises(ValueError):
        Partition(3, (0, 2, 1))
    with pytest.raises(ValueError):
        Partition(2, (1, 0))


def test_components_examples():
    comps = edges_to_components(EdgeVector.zeros(3))
    assert [c.vertices for c in comps] == [(0,), (1,), (2,)]
    comps = edges_to_components(EdgeVector.from_pairs(3, [(0, 1), (1, 2)]))
    assert len(comps) == 1 and comps[0].vertices == (0, 1, 2) and len(comps[0].edges) == 2
    comps = edges_to_components(EdgeVector.from_pairs(4, [(0, 1), (2, 3)]))
    assert [c.vertices for c in comps] == [(0, 1), (2, 3)]


def test_component_rejects_outside_edge():
    with pytest.raises(ValueError):
        Component((0, 1), ((1, 2),))


def test_is_clique_partitioning_examples():
    assert is_clique_partitioning(EdgeVector.zeros(3))
    assert not is_clique_partitioning(EdgeVector.from_pairs(3, [(0, 1), (1, 2)]))
    assert is_clique_partitioning(EdgeVector.from_pairs(4, [(0, 1), (2, 3)]))


def test_repair_examples():
    assert repair_to_clique_partitioning(EdgeVector.from_pairs(3, [(0, 1), (1, 2)])) == EdgeVector.ones(3)
    got = repair_to_clique_partitioning(EdgeVector.from_pairs(5, [(0, 1), (1, 2), (3, 4)]))
    assert got.pairs() == [(0, 1), (0, 2), (1, 2), (3, 4)]


def test_cut_weight_examples(triangle):
    comp = edges_to_components(EdgeVector.ones(3))[0]
    assert cut_weight(triangle, comp, {1}) == 2
    assert cut_weight(triangle, comp, {0}) == 0
    assert cut_weight(WeightedInstance(4, (5,) * 6), Component((0, 1, 2), ((0, 1),)), {2}) == 0
    with pytest.raises(ValueError):
        cut_weight(triangle, comp, set())
    with pytest.raises(ValueError):
        cut_weight(triangle, comp, {0, 1, 2})


def _violates_transitivity(x: EdgeVector) -> bool:
    return any(not c.is_satisfied(x) for c in all_constraints(x.n))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_clique_partitioning_iff_all_transitivity_constraints(n):
    for code in range(1 << num_pairs(n)):
        x = EdgeVector.from_code(n, code)
        assert is_clique_partitioning(x) == (not _violates_transitivity(x))


@pytest.mark.parametrize("n", range(1, 8))
def test_clique_partitionings_are_exactly_the_partitions(n):
    # Bell(n) clique partitionings, and each one decodes back to its partition
    seen = set()
    for labels in rgs_array(n):
        p = Partition(n, tuple(int(v) for v in labels))
        x = partition_to_edges(p)
        assert is_clique_partitioning(x)
        assert edges_to_partition(x) == p
        seen.add(x.code)
    assert len(seen) == len(rgs_array(n))


@given(edge_vectors())
def test_repair_idempotent_and_monotone(x):
    y = repair_to_clique_partitioning(x)
    assert is_clique_partitioning(y)
    assert repair_to_clique_partitioning(y) == y
    assert all(b <= c for b, c in zip(x.bits, y.bits))
    if is_clique_partitioning(x):
        assert y == x


@given(instances(min_n=1, max_n=8), st.data())
def test_objective_of_partition_matches_block_double_loop(inst, data):
    labels = data.draw(st.lists(st.integers(0, 3), min_size=inst.n, max_size=inst.n))
    p = Partition.from_labels(labels)
    expected = 0
    for block in p.blocks():
        for a, b in itertools.combinations(block, 2):
            expected += inst.w(a, b)
    assert objective_value(inst, partition_to_edges(p)) == expected


@given(edge_vectors())
def test_code_round_trip(x):
    assert EdgeVector.from_code(x.n, x.code) == x
