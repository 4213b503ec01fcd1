"""Brute-force ground truth and the registry of worked-example fixtures.

Everything here enumerates complete feasible allocations, so it is only
meant for small instances. The enumeration bound (``n ** m`` assignments)
defaults to ``DEFAULT_BOUND`` and can be overridden with the
``FAIRALLOC_ORACLE_BOUND`` environment variable.
"""

import os
from dataclasses import dataclass, field
from itertools import product

from .constraints import (
    BipartiteMatchingConstraint,
    BudgetConstraint,
    ConflictGraphConstraint,
    MatroidIntersection,
    complementary_pairs,
    no_ef1_witness,
)
from .errors import CapabilityError, InputError, NotBaseOrderableError
from .fairness import (
    is_ef1,
    is_efx,
    is_fef1,
    is_pareto_efficient,
    is_weak_fef1,
    nash_welfare,
    social_welfare,
)
from .matroid import (
    GraphicMatroid,
    PartitionMatroid,
    UniformMatroid,
    feasible_exchange_bijection,
    free_extend,
    is_base_orderable,
)
from .model import Allocation, Instance, check_feasible

DEFAULT_BOUND = 10**7
BOUND_ENV = "FAIRALLOC_ORACLE_BOUND"


def oracle_bound(bound=None):
    if bound is not None:
        return bound
    raw = os.environ.get(BOUND_ENV)
    if raw is None:
        return DEFAULT_BOUND
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{BOUND_ENV} must be an integer, got {raw!r}") from None


def _guard(inst, bound):
    bound = oracle_bound(bound)
    if inst.n**inst.m > bound:
        raise CapabilityError(f"{inst.n}^{inst.m} assignments exceed the enumeration bound {bound}")


def enumerate_feasible(inst, bound=None):
    """Yield every complete feasible allocation.

    Items are assigned in id order and agents tried in id order, so the
    stream order is deterministic. Downward-closed constraints are pruned
    as soon as a partial bundle becomes infeasible.
    """
    _guard(inst, bound)
    prune = all(c.is_downward_closed for c in inst.constraints)
    bundles = [set() for _ in inst.agents]
    feasible = inst.is_feasible_bundle

    def go(g):
        if g == inst.m:
            if prune or all(feasible(i, b) for i, b in enumerate(bundles)):
                yield Allocation(bundles)
            return
        for i in inst.agents:
            bundles[i].add(g)
            if not prune or feasible(i, bundles[i]):
                yield from go(g + 1)
            bundles[i].discard(g)

    yield from go(0)


def count_feasible(inst, bound=None):
    """Independent count: test every owner vector with the feasibility checker."""
    _guard(inst, bound)
    return sum(
        1
        for owners in product(range(inst.n), repeat=inst.m)
        if check_feasible(Allocation.from_owners(owners, inst.n), inst).feasible
    )


NOTIONS = {
    "F-EF1": is_fef1,
    "EF1": is_ef1,
    "EFX": is_efx,
    "weak-F-EF1": is_weak_fef1,
}


@dataclass(frozen=True)
class Existence:
    """``holds`` with a witness allocation when some allocation satisfies the notion."""

    holds: bool
    witness: Allocation = None
    checked: int = 0

    def __bool__(self):
        return self.holds


def exists_fair(inst, notion, bound=None):
    if notion not in NOTIONS:
        raise InputError(f"unknown notion {notion!r}; choose from {sorted(NOTIONS)}")
    test = NOTIONS[notion]
    checked = 0
    for x in enumerate_feasible(inst, bound):
        checked += 1
        if test(x, inst):
            return Existence(True, x, checked)
    return Existence(False, None, checked)


def _mnw_key(x, inst):
    values = [inst.value(i, x[i]) for i in inst.agents]
    positive = [v for v in values if v > 0]
    p = 1
    for v in positive:
        p *= v
    return (len(positive), p)


def mnw(inst, bound=None):
    """All maximum-Nash-welfare allocations and the optimal key.

    The key is ``(number of agents with positive value, product of the
    positive values)``, compared lexicographically, so zero products are
    refined by first maximizing how many agents get something.
    """
    best, argmax = None, []
    for x in enumerate_feasible(inst, bound):
        k = _mnw_key(x, inst)
        if best is None or k > best:
            best, argmax = k, [x]
        elif k == best:
            argmax.append(x)
    if best is None:
        raise InputError("instance has no complete feasible allocation")
    return argmax, best


def swm_oracle(inst, bound=None):
    """Maximum total welfare and the first allocation attaining it."""
    best, arg = None, None
    for x in enumerate_feasible(inst, bound):
        w = social_welfare(x, inst)
        if best is None or w > best:
            best, arg = w, x
    if best is None:
        raise InputError("instance has no complete feasible allocation")
    return best, arg


def value_vectors(inst, bound=None):
    return {tuple(inst.value(i, x[i]) for i in inst.agents) for x in enumerate_feasible(inst, bound)}


# -- fixtures ----------------------------------------------------------------


@dataclass
class Check:
    description: str
    expected: object
    observed: object

    @property
    def ok(self):
        return self.expected == self.observed


@dataclass
class FixtureResult:
    id: str
    title: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.ok for c in self.checks)


@dataclass(frozen=True)
class Fixture:
    id: str
    title: str
    build: object
    allocations: object = None
    verify: object = None

    def instance(self):
        return self.build()

    def labelled_allocations(self):
        return dict(self.allocations()) if self.allocations else {}


def mnw_not_ef1_instance():
    rows = [
        [1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        [1, 1, 0, 0, 1, 1, 1, 1, 1, 1],
    ]
    c = PartitionMatroid([range(4), range(4, 10)], [2, 3])
    return Instance(rows, c, agent_names=["Alice", "Bob"], name="mnw-not-ef1")


def _mnw_allocations():
    return {
        "mnw": Allocation([{0, 1, 4, 5, 6}, {2, 3, 7, 8, 9}]),
        "alternative": Allocation([{0, 2, 4, 5, 6}, {1, 3, 7, 8, 9}]),
    }


def _verify_mnw(inst):
    from .algorithms import solve

    allocs = _mnw_allocations()
    shown, alt = allocs["mnw"], allocs["alternative"]
    argmax, key = mnw(inst)
    sol = solve(inst)
    return [
        Check("shown allocation is feasible", True, check_feasible(shown, inst).feasible),
        Check("Nash welfare product of the shown allocation", 6, nash_welfare(shown, inst)),
        Check("shown allocation is F-EF1", False, bool(is_fef1(shown, inst))),
        Check("shown allocation is maximum Nash welfare", True, shown in argmax and key == (2, 6)),
        Check("number of maximum Nash welfare allocations", 20, len(argmax)),
        Check("some maximum Nash welfare allocation is F-EF1", False, any(is_fef1(x, inst) for x in argmax)),
        Check("alternative values", (1, 4), tuple(inst.value(i, alt[i]) for i in inst.agents)),
        Check("alternative allocation is F-EF1", True, bool(is_fef1(alt, inst))),
        Check("attainable value vectors", {(2, 3), (1, 4), (0, 5)}, value_vectors(inst)),
        Check("an F-EF1 allocation exists", True, bool(exists_fair(inst, "F-EF1"))),
        Check("maximum welfare", 5, swm_oracle(inst)[0]),
        Check("dispatcher's choice", "iterated_priority_matching", sol.algorithm),
        Check("dispatcher output is F-EF1", True, bool(is_fef1(sol.allocation, inst))),
    ]


def heterogeneous_categories_instance():
    rows = [[1, 1, 0, 0], [1, 1, 0, 0]]
    alice = PartitionMatroid([{0, 2}, {1, 3}], [1, 1])
    bob = PartitionMatroid([{0}, {1}, {2, 3}], [1, 1, 0])
    return Instance(rows, [alice, bob], agent_names=["Alice", "Bob"], name="heterogeneous-categories")


def _verify_heterogeneous(inst):
    from .algorithms import choose_algorithm

    allocs = list(enumerate_feasible(inst))
    unique = allocs[0] if len(allocs) == 1 else None
    try:
        choose_algorithm(inst)
        refusal = None
    except CapabilityError as e:
        refusal = e.reference
    return [
        Check("number of feasible allocations", 1, len(allocs)),
        Check("independent count", 1, count_feasible(inst)),
        Check("the unique allocation", [[2, 3], [0, 1]], unique.to_lists() if unique else None),
        Check("unique allocation is F-EF1", False, bool(is_fef1(unique, inst)) if unique else None),
        Check("unique allocation is weakly F-EF1", False, bool(is_weak_fef1(unique, inst)) if unique else None),
        Check("an F-EF1 allocation exists", False, bool(exists_fair(inst, "F-EF1"))),
        Check("dispatcher refuses with", "heterogeneous-categories", refusal),
    ]


#: Seats: 0 physics-morning, 1 physics-evening, 2 chemistry-morning, 3 chemistry-evening.
SEATS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def _complementary_checks(inst, pairs_expected, partitions_expected=None):
    from .algorithms import choose_algorithm
    from .constraints import feasible_partitions

    c = inst.constraints[0]
    checks = [Check("complementary pairs", pairs_expected, complementary_pairs(c))]
    if partitions_expected is not None:
        parts = [[sorted(a), sorted(b)] for a, b in feasible_partitions(c)]
        checks.append(Check("feasible two-way partitions", partitions_expected, parts))
    checks += [
        Check("an EF1 allocation exists", False, bool(exists_fair(inst, "EF1"))),
        Check("an F-EF1 allocation exists", False, bool(exists_fair(inst, "F-EF1"))),
    ]
    try:
        choose_algorithm(inst)
        refused = False
    except CapabilityError:
        refused = True
    checks.append(Check("dispatcher refuses", True, refused))
    return checks


def _named(inst, name):
    inst.name = name
    return inst


def matching_instance():
    return _named(no_ef1_witness(BipartiteMatchingConstraint(SEATS), (0, 3)), "matching-complementary")


def _verify_matching(inst):
    checks = _complementary_checks(inst, [(0, 3), (1, 2)], [[[0, 3], [1, 2]]])
    by_time = PartitionMatroid([{0, 2}, {1, 3}], [1, 1])
    by_subject = PartitionMatroid([{0, 1}, {2, 3}], [1, 1])
    same = MatroidIntersection(by_time, by_subject)
    checks.append(Check("matroid-intersection form has the same pairs", [(0, 3), (1, 2)], complementary_pairs(same)))
    return checks


def conflict_instance():
    c = ConflictGraphConstraint(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])
    return _named(no_ef1_witness(c, (0, 2)), "conflict-graph-cycle")


def _verify_conflict(inst):
    return _complementary_checks(inst, [(0, 2), (1, 3)])


def budget_instance():
    return _named(no_ef1_witness(BudgetConstraint([10, 10, 20], 20), (0, 1)), "budget-complementary")


def _verify_budget(inst):
    return _complementary_checks(inst, [(0, 1)], [[[0, 1], [2]]])


def efx_uniform_instance():
    rows = [[0, 0, 0, 1], [0, 0, 0, 1]]
    return Instance(rows, UniformMatroid(range(4), 2), name="efx-uniform")


def _verify_efx(inst):
    return [
        Check("number of feasible allocations", 6, count_feasible(inst)),
        Check("an EFX allocation exists", False, bool(exists_fair(inst, "EFX"))),
        Check("an F-EF1 allocation exists", True, bool(exists_fair(inst, "F-EF1"))),
    ]


#: Edges of K4 on vertices 1..4 (stored 0..3), in the order 12, 13, 14, 23, 24, 34.
K4_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
K4_VALUES = [0, 1, 0, 1, 1, 0]


def k4_matroid():
    return GraphicMatroid(4, K4_EDGES)


def k4_instance():
    """Two copies of K4; both agents value edges 23, 13 and 24 at 1."""
    edges = K4_EDGES + [(u + 4, v + 4) for u, v in K4_EDGES]
    rows = [K4_VALUES * 2, K4_VALUES * 2]
    return Instance(rows, GraphicMatroid(8, edges), agent_names=["Alice", "Bob"], name="k4-graphic")


def _k4_allocations():
    alice = {0, 3, 5, 6, 9, 11}
    return {"stuck": Allocation([alice, set(range(12)) - alice])}


def _verify_k4(inst):
    from .algorithms import iterated_swaps

    k4 = k4_matroid()
    first, second = frozenset({0, 3, 5}), frozenset({4, 2, 1})
    stuck = _k4_allocations()["stuck"]
    try:
        iterated_swaps(inst, initial=stuck)
        error = None
    except NotBaseOrderableError as e:
        error = e.reference
    return [
        Check("bijection between {12,23,34} and {24,41,13}", None, feasible_exchange_bijection(k4, first, second)),
        Check("K4 is base-orderable", False, is_base_orderable(k4)),
        Check("free extension of K4 is base-orderable", False, is_base_orderable(free_extend(k4, 1))),
        Check("stuck allocation values", (2, 4), tuple(inst.value(i, stuck[i]) for i in inst.agents)),
        Check("stuck allocation is EF1", False, bool(is_ef1(stuck, inst))),
        Check("iterated swaps from the stuck allocation fails with", "k4-graphic", error),
        Check("an EF1 allocation exists", True, bool(exists_fair(inst, "EF1"))),
    ]


def weak_fef1_instance():
    rows = [[1, 1], [1, 1]]
    return Instance(
        rows,
        [UniformMatroid(range(2), 1), UniformMatroid(range(2), 2)],
        agent_names=["Alice", "Bob"],
        name="weak-fef1",
    )


def _weak_allocations():
    return {"bob-takes-all": Allocation([set(), {0, 1}])}


def _verify_weak(inst):
    x = _weak_allocations()["bob-takes-all"]
    return [
        Check("allocation is feasible", True, check_feasible(x, inst).feasible),
        Check("allocation is weakly F-EF1", True, bool(is_weak_fef1(x, inst))),
        Check("allocation is F-EF1", False, bool(is_fef1(x, inst))),
    ]


def ipm_non_pe_instance():
    rows = [[1, 0, 1, 1], [1, 1, 0, 0]]
    return Instance(rows, UniformMatroid(range(4), 2), agent_names=["Alice", "Bob"], name="ipm-non-pe")


def _non_pe_allocations():
    return {
        "shown": Allocation([{0, 2}, {1, 3}]),
        "dominating": Allocation([{2, 3}, {0, 1}]),
    }


def _verify_non_pe(inst):
    allocs = _non_pe_allocations()
    x, y = allocs["shown"], allocs["dominating"]
    return [
        Check("shown allocation is feasible", True, check_feasible(x, inst).feasible),
        Check("shown allocation is F-EF1", True, bool(is_fef1(x, inst))),
        Check("shown allocation is Pareto-efficient", False, is_pareto_efficient(x, inst).is_efficient),
        Check("dominating values", (2, 2), tuple(inst.value(i, y[i]) for i in inst.agents)),
        Check("shown values", (2, 1), tuple(inst.value(i, x[i]) for i in inst.agents)),
    ]


FIXTURES = {
    f.id: f
    for f in [
        Fixture(
            "mnw-not-ef1",
            "maximum Nash welfare can violate F-EF1 under shared partition constraints",
            mnw_not_ef1_instance,
            _mnw_allocations,
            _verify_mnw,
        ),
        Fixture(
            "heterogeneous-categories",
            "different category structures can rule out F-EF1",
            heterogeneous_categories_instance,
            None,
            _verify_heterogeneous,
        ),
        Fixture(
            "matching-complementary",
            "course-seat matching constraints force two seats together",
            matching_instance,
            None,
            _verify_matching,
        ),
        Fixture(
            "conflict-graph-cycle",
            "a 4-cycle conflict graph forces diagonal items together",
            conflict_instance,
            None,
            _verify_conflict,
        ),
        Fixture(
            "budget-complementary",
            "a budget constraint forces the two cheap items together",
            budget_instance,
            None,
            _verify_budget,
        ),
        Fixture(
            "efx-uniform",
            "no EFX allocation under a shared uniform matroid",
            efx_uniform_instance,
            None,
            _verify_efx,
        ),
        Fixture(
            "k4-graphic",
            "the graphic matroid of K4 is not base-orderable and single swaps get stuck",
            k4_instance,
            _k4_allocations,
            _verify_k4,
        ),
        Fixture(
            "weak-fef1",
            "weak F-EF1 is strictly weaker than F-EF1 under different capacities",
            weak_fef1_instance,
            _weak_allocations,
            _verify_weak,
        ),
        Fixture(
            "ipm-non-pe",
            "an F-EF1 allocation iterated priority matching may return that is not Pareto-efficient",
            ipm_non_pe_instance,
            _non_pe_allocations,
            _verify_non_pe,
        ),
    ]
}


def run_fixture(fixture_id, inst=None):
    """Evaluate a fixture's checks; ``inst`` overrides the built instance (e.g. one read from disk)."""
    if fixture_id not in FIXTURES:
        raise InputError(f"unknown fixture {fixture_id!r}; choose from {sorted(FIXTURES)}")
    f = FIXTURES[fixture_id]
    inst = inst if inst is not None else f.instance()
    return FixtureResult(f.id, f.title, f.verify(inst))


def run_all_fixtures():
    return [run_fixture(k) for k in FIXTURES]
