import random

import pytest
from hypothesis import given, strategies as st

from fairalloc.constraints import BudgetConstraint
from fairalloc.errors import InputError
from fairalloc.fairness import (
    CycleError,
    EnvyGraph,
    Pareto,
    best_feasible_subset,
    envy_graph,
    fairness_report,
    feasible_value,
    is_ef1,
    is_efx,
    is_fef1,
    is_pareto_efficient,
    is_weak_fef1,
    nash_welfare,
    positive_feasible_envy,
    topological_order,
)
from fairalloc.generators import random_bo_instance, random_partition_instance
from fairalloc.matroid import PartitionMatroid, UniformMatroid
from fairalloc.model import Allocation, Instance
from fairalloc.oracle import enumerate_feasible, mnw_not_ef1_instance, weak_fef1_instance
from oracles import brute_best_subset_value


@given(st.integers(0, 10**6))
def test_best_subset_matches_brute_force(seed):
    rng = random.Random(seed)
    inst = random_bo_instance(rng, n=2, m=rng.randint(1, 7)) if seed % 2 else random_partition_instance(
        rng, n=2, m=rng.randint(1, 7), n_categories=3
    )
    t = {g for g in range(inst.m) if rng.random() < 0.6}
    for i in inst.agents:
        s = best_feasible_subset(inst, i, t)
        assert s <= t and inst.constraints[i].is_independent(s)
        want = brute_best_subset_value(inst.valuations[i], t, inst.constraints[i].is_independent)
        assert feasible_value(inst, i, t) == want


def test_best_subset_non_matroid():
    inst = Instance([[5, 5, 9]], BudgetConstraint([10, 10, 20], 20))
    assert feasible_value(inst, 0, {0, 1, 2}) == 10


def test_mnw_instance_verdicts():
    inst = mnw_not_ef1_instance()
    x = Allocation([{0, 1, 4, 5, 6}, {2, 3, 7, 8, 9}])
    assert not is_fef1(x, inst)
    assert is_fef1(x, inst).witness == (1, 0)
    y = Allocation([{0, 2, 4, 5, 6}, {1, 3, 7, 8, 9}])
    assert is_fef1(y, inst)
    with pytest.raises(InputError):
        is_fef1(Allocation([{0, 1, 2}, {3}]), inst)


def test_weak_versus_strong():
    inst = weak_fef1_instance()
    x = Allocation([set(), set(range(inst.m))])
    assert is_weak_fef1(x, inst) and not is_fef1(x, inst)


def test_efx_and_ef1_plain():
    inst = Instance([[3, 1, 1], [3, 1, 1]], UniformMatroid(range(3), 3))
    x = Allocation([{0}, {1, 2}])
    assert is_efx(x, inst) and is_ef1(x, inst)
    y = Allocation([{1}, {0, 2}])
    assert is_ef1(y, inst) and not is_efx(y, inst)


def test_positive_envy_and_nash():
    inst = Instance([[2, 1], [1, 2]], UniformMatroid(range(2), 2))
    x = Allocation([{1}, {0}])
    assert positive_feasible_envy(x, inst) == [[0, 1], [1, 0]]
    assert nash_welfare(x, inst) == 1


def test_envy_graph_and_order():
    g = EnvyGraph(4, frozenset({(2, 0), (3, 1)}))
    assert g.is_acyclic()
    assert topological_order(g) == [2, 0, 3, 1]
    assert topological_order(g, priority=[3, 2, 1, 0]) == [3, 2, 1, 0]
    assert g.topological_order(priority=[1, 0, 3, 2]) == [3, 1, 2, 0]
    cyc = EnvyGraph(3, frozenset({(0, 1), (1, 2), (2, 0)}))
    assert cyc.find_cycle() == [0, 1, 2]
    with pytest.raises(CycleError) as e:
        cyc.topological_order()
    assert e.value.cycle == [0, 1, 2]


@given(st.integers(0, 10**6))
def test_identical_valuations_give_acyclic_envy(seed):
    # i envies j only if v(X_i) < v(X_j), so values strictly rise along edges
    rng = random.Random(seed)
    inst = random_partition_instance(rng, n=rng.randint(2, 4), m=rng.randint(1, 7), n_categories=2,
                                     identical_valuations=True)
    owners = [rng.randrange(-1, inst.n) for _ in range(inst.m)]
    x = Allocation([{g for g in range(inst.m) if owners[g] == i} for i in inst.agents])
    # a partial allocation; restrict each bundle to something the owner may hold
    x = Allocation([best_feasible_subset(inst, i, x[i]) for i in inst.agents])
    g = envy_graph(x, inst)
    assert g.is_acyclic()
    order = g.topological_order()
    pos = {a: k for k, a in enumerate(order)}
    assert all(pos[a] < pos[b] for a, b in g.edges)


def test_pareto():
    inst = Instance([[1, 0], [1, 1]], UniformMatroid(range(2), 2))
    assert is_pareto_efficient(Allocation([{0}, {1}]), inst) is Pareto.EFFICIENT
    assert is_pareto_efficient(Allocation([{1}, {0}]), inst) is Pareto.DOMINATED
    assert Pareto.UNKNOWN.is_efficient is None
    same = Instance([[1, 1], [1, 1]], UniformMatroid(range(2), 2))
    assert is_pareto_efficient(Allocation([{0, 1}, set()]), same).is_efficient


def test_pareto_large_falls_back_to_welfare():
    inst = Instance([[1] * 24, [0] * 24], PartitionMatroid([range(24)], [24]))
    x = Allocation([set(range(24)), set()])
    assert is_pareto_efficient(x, inst, bound=10) is Pareto.EFFICIENT_SWM


def test_report_dict():
    inst = mnw_not_ef1_instance()
    x = next(iter(enumerate_feasible(inst)))
    d = fairness_report(x, inst, pareto=True).as_dict()
    assert set(d) >= {"values", "f_ef1", "efx", "pareto", "social_welfare"}
