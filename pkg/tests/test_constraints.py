import pytest

from fairalloc.constraints import (
    BipartiteMatchingConstraint,
    BudgetConstraint,
    ConflictGraphConstraint,
    MatroidIntersection,
    SetSystem,
    complementary_pairs,
    feasible_partitions,
    no_ef1_witness,
)
from fairalloc.errors import InputError, NoFeasiblePartitionError
from fairalloc.matroid import GraphicMatroid, PartitionMatroid, UniformMatroid
from fairalloc.oracle import SEATS, exists_fair


def test_matching_seats_complementary():
    c = BipartiteMatchingConstraint(SEATS)
    assert complementary_pairs(c) == [(0, 3), (1, 2)]
    assert [sorted(a) for a, _ in feasible_partitions(c)] == [[0, 3]]


def test_intersection_of_partitions_matches_matching():
    by_time = PartitionMatroid([{0, 2}, {1, 3}], [1, 1])
    by_subject = PartitionMatroid([{0, 1}, {2, 3}], [1, 1])
    assert complementary_pairs(MatroidIntersection(by_time, by_subject)) == [(0, 3), (1, 2)]


def test_conflict_cycle_diagonals():
    c = ConflictGraphConstraint(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert complementary_pairs(c) == [(0, 2), (1, 3)]


def test_budget_cheap_pair():
    assert complementary_pairs(BudgetConstraint([10, 10, 20], 20)) == [(0, 1)]


def test_budget_without_complementary_items():
    # costs 1,2,3,4 with budget 7: downward closed, not a matroid, no complementary pair
    assert complementary_pairs(BudgetConstraint([1, 2, 3, 4], 7)) == []


def test_matroids_with_a_partition_have_none():
    for m in (UniformMatroid(range(4), 2), GraphicMatroid(4, [(0, 1), (1, 2), (2, 3), (3, 0)])):
        assert complementary_pairs(m) == []


def test_no_partition_raises():
    with pytest.raises(NoFeasiblePartitionError):
        complementary_pairs(UniformMatroid(range(5), 2))


def test_witness_has_no_ef1_allocation():
    for c, pair in [
        (BipartiteMatchingConstraint(SEATS), (0, 3)),
        (BipartiteMatchingConstraint(SEATS), (1, 2)),
        (ConflictGraphConstraint(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)]), (1, 3)),
        (BudgetConstraint([10, 10, 20], 20), (0, 1)),
    ]:
        inst = no_ef1_witness(c, pair)
        assert inst.valuations[0] == inst.valuations[1]
        assert not exists_fair(inst, "EF1")


def test_every_complementary_pair_blocks_ef1():
    # a conflict path 0-1-2-3-4-5 plus chord: search all complementary pairs end to end
    c = ConflictGraphConstraint(range(6), [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
    pairs = complementary_pairs(c)
    assert pairs
    for p in pairs:
        assert not exists_fair(no_ef1_witness(c, p), "EF1")


def test_witness_rejects_separable_pair():
    with pytest.raises(InputError):
        no_ef1_witness(BudgetConstraint([10, 10, 20], 20), (0, 2))


def test_set_system_queries():
    s = SetSystem(range(3), lambda t: len(t) <= 1)
    assert s.is_feasible({1}) and not s.is_feasible({0, 1})
    with pytest.raises(InputError):
        s.is_feasible({7})
    with pytest.raises(InputError):
        BudgetConstraint([1, -1], 3)
    with pytest.raises(InputError):
        ConflictGraphConstraint(range(2), [(0, 5)])
    with pytest.raises(InputError):
        MatroidIntersection(UniformMatroid(range(2), 1), UniformMatroid(range(3), 1))
