from fractions import Fraction

import pytest

from fairalloc.constraints import BudgetConstraint
from fairalloc.errors import CapabilityError, InputError
from fairalloc.matroid import GraphicMatroid, PartitionMatroid, UniformMatroid
from fairalloc.model import Allocation, Instance, check_feasible, exact, has_complete_allocation, require_feasible
from fairalloc.oracle import heterogeneous_categories_instance, mnw_not_ef1_instance


def test_exact_values():
    assert exact(3) == 3 and isinstance(exact(3), int)
    assert exact("1/2") == Fraction(1, 2)
    assert exact(0.5) == Fraction(1, 2)
    assert exact(Fraction(4, 2)) == 2 and isinstance(exact(Fraction(4, 2)), int)
    for bad in (-1, "x", float("nan"), True, None):
        with pytest.raises(InputError):
            exact(bad)


def test_instance_validation():
    u = UniformMatroid(range(2), 1)
    with pytest.raises(InputError):
        Instance([], u)
    with pytest.raises(InputError):
        Instance([[1, 2], [1]], u)
    with pytest.raises(InputError):
        Instance([[1, 2, 3]], u)
    with pytest.raises(InputError):
        Instance([[1, 2]], [u, u])
    with pytest.raises(InputError):
        Instance([[1, 2]], u, agent_names=["a", "b"])


def test_instance_properties():
    inst = mnw_not_ef1_instance()
    assert inst.is_binary and inst.is_partition and inst.has_identical_categories
    assert not inst.has_identical_valuations
    cats, caps = inst.partition_structure()
    assert [sorted(c) for c in cats] == [[0, 1, 2, 3], list(range(4, 10))]
    assert caps == ((2, 3), (2, 3))
    assert inst.desired_set(0) == {0, 1}
    assert inst.value(1, {0, 4, 5}) == 3


def test_heterogeneous_categories_structure():
    inst = heterogeneous_categories_instance()
    with pytest.raises(CapabilityError) as e:
        inst.partition_structure()
    assert e.value.reference == "heterogeneous-categories"


def test_check_feasible_diagnostics():
    inst = Instance([[1, 1, 1]] * 2, UniformMatroid(range(3), 2))
    r = check_feasible(Allocation([{0, 1}, {2}]), inst)
    assert r.feasible
    r = check_feasible(Allocation([{0, 1, 2}, {2}]), inst)
    assert not r.feasible and r.overlapping_items == (2,) and r.independent == (False, True)
    r = check_feasible(Allocation([{0}, {1}]), inst)
    assert r.missing_items == (2,) and not r.complete
    r = check_feasible(Allocation([{0, 9}, {1, 2}]), inst)
    assert r.unknown_items == (9,)
    r = check_feasible(Allocation([{0, 1, 2}]), inst)
    assert not r.n_bundles_ok
    assert len(r.violations()) >= 2
    with pytest.raises(InputError):
        require_feasible(Allocation([{0}, {1}]), inst)


def test_allocation_helpers():
    x = Allocation([{0, 2}, {1}])
    assert x.owners(4) == [0, 1, 0, -1]
    assert Allocation.from_owners([0, 1, 0], 2) == Allocation([{0, 2}, {1}])
    assert x.swap(0, 2, 1, 1) == Allocation([{0, 1}, {2}])
    assert x.restrict({0, 1}) == Allocation([{0}, {1}])


def test_has_complete_allocation():
    assert has_complete_allocation(mnw_not_ef1_instance())
    tight = Instance([[1] * 5] * 2, PartitionMatroid([range(5)], [2]))
    assert not has_complete_allocation(tight)
    forest = Instance([[1] * 3] * 2, GraphicMatroid(3, [(0, 1), (1, 2), (2, 0)]))
    assert has_complete_allocation(forest)
    assert has_complete_allocation(Instance([[1] * 3] * 2, BudgetConstraint([10, 10, 20], 20)))
    assert not has_complete_allocation(Instance([[1] * 3] * 2, BudgetConstraint([10, 15, 20], 20)))
    assert has_complete_allocation(heterogeneous_categories_instance())
