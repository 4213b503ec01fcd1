"""Allocation algorithms and the dispatcher that picks among them.

Every instance-level algorithm has the signature
``algo(inst, order=None, verify=False, trace=None) -> Allocation``.
``order`` overrides the initial agent order, ``verify`` turns on mid-run
invariant checks (raising :class:`InvariantViolation`), and ``trace``
collects iteration counts and per-step statistics.

All choices left open by the underlying procedures are resolved toward the
lowest id: pick ties, leftover assignment, dummy placement, category ties.
"""

from dataclasses import dataclass, field

from .constraints import BipartiteMatchingConstraint, BudgetConstraint, ConflictGraphConstraint
from .errors import CapabilityError, InputError, InvariantViolation, NotBaseOrderableError
from .fairness import CycleError, envy_graph, positive_feasible_envy
from .matching import priority_matching
from .matroid import PartitionMatroid, free_extend, require_exchange_bijection
from .model import Allocation, Instance, check_feasible
from .optimize import agent_item_graph, max_weight_swm


@dataclass
class Trace:
    """Run statistics filled in by algorithms when passed as ``trace=``."""

    iterations: int = 0
    welfare: list = field(default_factory=list)
    potential: list = field(default_factory=list)
    steps: list = field(default_factory=list)

    def as_dict(self):
        from .io import format_value

        return {
            "iterations": self.iterations,
            "welfare": [format_value(v) for v in self.welfare],
            "potential": [format_value(v) for v in self.potential],
            "steps": [list(s) if isinstance(s, tuple) else s for s in self.steps],
        }


def _fail(message):
    raise InvariantViolation(message)


def _order(n, order):
    if order is None:
        return list(range(n))
    order = list(order)
    if sorted(order) != list(range(n)):
        raise InputError(f"order {order} is not a permutation of the agents 0..{n - 1}")
    return order


# -- capped round robin ------------------------------------------------------


def crr(items, capacities, valuations, sigma):
    """Capped round robin on one category.

    Agents pick in the cyclic order ``sigma``; an agent who reached her
    capacity is skipped. Each pick is the picker's most valuable remaining
    item, lowest id on ties. Returns one frozenset per agent.
    """
    items = sorted(items)
    n = len(capacities)
    sigma = _order(n, sigma)
    if sum(capacities) < len(items):
        raise InputError(f"capacities {list(capacities)} cannot hold {len(items)} items")
    left = set(items)
    got = [[] for _ in range(n)]
    t = 0
    while left:
        i = sigma[t]
        if len(got[i]) < capacities[i]:
            row = valuations[i]
            g = max(left, key=lambda g: (row[g], -g))
            got[i].append(g)
            left.discard(g)
        t = (t + 1) % n
    return [frozenset(b) for b in got]


def _capped_value(row, bundle, cap):
    """Best value of at most ``cap`` items of ``bundle`` (a single category)."""
    return sum(sorted((row[g] for g in bundle), reverse=True)[:cap])


def surplus(valuations, capacities, i, split):
    """Agent ``i``'s own value minus her capped value of the other agent's share.

    Two agents, one category; ``split`` holds the two shares.
    """
    j = 1 - i
    row = valuations[i]
    return _capped_value(row, split[i], capacities[i]) - _capped_value(row, split[j], capacities[i])


def crr_single_category(v, v_other, leader, items, capacities):
    """Two-agent CRR under valuations ``(v, v_other)`` with ``leader`` picking first."""
    return crr(items, capacities, (v, v_other), (leader, 1 - leader))


def _partition(inst):
    if not inst.is_partition:
        raise CapabilityError("needs partition-matroid constraints")
    return inst.partition_structure()


def _caps_in(caps, h):
    return [row[h] for row in caps]


def _union(bundles, split):
    return [b | s for b, s in zip(bundles, split)]


def capped_round_robin(inst, order=None, verify=False, trace=None):
    """CRR on an instance whose constraints have a single shared category."""
    categories, caps = _partition(inst)
    if len(categories) != 1:
        raise CapabilityError("capped round robin handles a single category; use back_and_forth_crr or dispatch")
    x = Allocation(crr(categories[0], _caps_in(caps, 0), inst.valuations, _order(inst.n, order)))
    if trace is not None:
        trace.iterations = 1
    return x


def back_and_forth_crr(inst, order=None, verify=False, trace=None):
    """CRR on the first category in ``order``, then on the second in reverse."""
    categories, caps = _partition(inst)
    if len(categories) > 2:
        raise CapabilityError(f"back-and-forth CRR handles at most two categories, got {len(categories)}")
    sigma = _order(inst.n, order)
    bundles = [frozenset()] * inst.n
    for h, cat in enumerate(categories):
        seq = sigma if h == 0 else sigma[::-1]
        bundles = _union(bundles, crr(cat, _caps_in(caps, h), inst.valuations, seq))
        if trace is not None:
            trace.steps.append(("category", h, list(seq)))
    if trace is not None:
        trace.iterations = len(categories)
    return Allocation(bundles)


def _next_sigma(x, inst, verify, priority):
    g = envy_graph(x, inst)
    try:
        return g.topological_order(priority)
    except CycleError as e:
        if verify:
            _fail(f"feasible-envy graph has a cycle {e.cycle}")
        raise InvariantViolation(f"feasible-envy graph has a cycle {e.cycle}") from None


def per_category_crr(inst, order=None, verify=False, trace=None):
    """CRR category by category, each time in topological order of the feasible-envy graph.

    Needs identical valuations; capacities may differ. The feasible-envy
    graph stays acyclic under identical valuations, which verification mode
    asserts after every category.
    """
    categories, caps = _partition(inst)
    if not inst.has_identical_valuations:
        raise CapabilityError("per-category CRR needs identical valuations")
    base = _order(inst.n, order)
    sigma = base
    bundles = [frozenset()] * inst.n
    for h, cat in enumerate(categories):
        bundles = _union(bundles, crr(cat, _caps_in(caps, h), inst.valuations, sigma))
        if trace is not None:
            trace.steps.append(("category", h, list(sigma)))
        sigma = _next_sigma(Allocation(bundles), inst, verify, base)
    if trace is not None:
        trace.iterations = len(categories)
    return Allocation(bundles)


def per_category_rr(inst, order=None, verify=False, trace=None):
    """Baseline: round robin per category, then rotate bundles along envy cycles.

    Requires identical capacities; rotating bundles between agents with
    different capacities would break feasibility.
    """
    categories, caps = _partition(inst)
    if any(row != caps[0] for row in caps):
        raise CapabilityError("per-category round robin needs identical capacities")
    base = _order(inst.n, order)
    sigma = base
    bundles = [frozenset()] * inst.n
    rotations = 0
    for h, cat in enumerate(categories):
        bundles = _union(bundles, crr(cat, _caps_in(caps, h), inst.valuations, sigma))
        while True:
            cycle = envy_graph(Allocation(bundles), inst).find_cycle()
            if cycle is None:
                break
            old = list(bundles)
            for t, a in enumerate(cycle):
                bundles[a] = old[cycle[(t + 1) % len(cycle)]]
            rotations += 1
            if trace is not None:
                trace.steps.append(("rotate", h, list(cycle)))
        sigma = envy_graph(Allocation(bundles), inst).topological_order(base)
    if trace is not None:
        trace.iterations = len(categories)
        trace.steps.append(("rotations", rotations))
    return Allocation(bundles)


# -- iterated priority matching ----------------------------------------------


def _check_ipm_state(bundles, inst, where):
    x = Allocation(bundles)
    cycle = envy_graph(x, inst).find_cycle()
    if cycle is not None:
        _fail(f"{where}: feasible-envy graph has a cycle {cycle}")
    worst = max((e for row in positive_feasible_envy(x, inst) for e in row), default=0)
    if worst > 1:
        _fail(f"{where}: positive feasible envy {worst} exceeds 1")


def iterated_priority_matching(inst, order=None, verify=False, trace=None):
    """Binary valuations: per category, repeated priority matchings, then leftovers.

    Each round matches agents with spare capacity to desired unallocated
    items, giving priority by a topological order of the feasible-envy
    graph. Leftover items (worthless to every agent with spare capacity)
    go in id order to the lowest-id agent with spare capacity.
    """
    categories, caps = _partition(inst)
    if not inst.is_binary:
        raise CapabilityError("iterated priority matching needs binary valuations")
    base = _order(inst.n, order)
    bundles = [frozenset()] * inst.n
    rounds = 0
    for h, cat in enumerate(categories):
        cap_h = _caps_in(caps, h)
        share = [set() for _ in inst.agents]
        for t in range(max(cap_h, default=0)):
            sigma = _next_sigma(Allocation(bundles), inst, verify, base)
            left = [cap_h[i] - len(share[i]) for i in inst.agents]
            graph = agent_item_graph(inst, cat, share, left)
            matched = priority_matching(graph, [i for i in sigma if i in graph])
            for i, g in matched.items():
                share[i].add(g)
            bundles = _union(bundles, [frozenset(s) for s in share])
            rounds += 1
            if trace is not None:
                trace.steps.append(("match", h, t, list(sigma), sorted(matched.items())))
            if verify:
                _check_ipm_state(bundles, inst, f"category {h} round {t + 1}")
        allocated = set().union(*share)
        for g in sorted(cat - allocated):
            slack = [i for i in inst.agents if len(share[i]) < cap_h[i]]
            if not slack:
                raise InputError(f"capacities in category {h} cannot hold all its items")
            share[slack[0]].add(g)
        bundles = _union(bundles, [frozenset(s) for s in share])
        if verify:
            _check_ipm_state(bundles, inst, f"category {h} leftovers")
    if trace is not None:
        trace.iterations = rounds
    return Allocation(bundles)


# -- two agents: RR-squared --------------------------------------------------


def category_orders(inst):
    """Each agent's categories by descending first-mover surplus, ties to the lowest id."""
    categories, caps = _partition(inst)
    orders = []
    for i in (0, 1):
        s = []
        for h, cat in enumerate(categories):
            cap_h = _caps_in(caps, h)
            split = crr(cat, cap_h, inst.valuations, (i, 1 - i))
            s.append(surplus(inst.valuations, cap_h, i, split))
        orders.append(sorted(range(len(categories)), key=lambda h: (-s[h], h)))
    return orders


def rr_squared(inst, first=0, verify=False, trace=None, order=None):
    """Two agents alternate choosing categories; each category is split by CRR, chooser first."""
    if inst.n != 2:
        raise CapabilityError(f"RR-squared is defined for exactly two agents, got {inst.n}")
    if order is not None:
        first = _order(2, order)[0]
    if first not in (0, 1):
        raise InputError("first must be agent 0 or 1")
    categories, caps = _partition(inst)
    pi = category_orders(inst)
    a = first
    chosen = set()
    bundles = [frozenset(), frozenset()]
    while len(chosen) < len(categories):
        h = next(h for h in pi[a] if h not in chosen)
        chosen.add(h)
        bundles = _union(bundles, crr(categories[h], _caps_in(caps, h), inst.valuations, (a, 1 - a)))
        if trace is not None:
            trace.steps.append(("choose", a, h))
        a = 1 - a
    if trace is not None:
        trace.iterations = len(categories)
    x = Allocation(bundles)
    if verify and positive_feasible_envy(x, inst)[first][1 - first] != 0:
        _fail("the agent choosing first feasibly envies the other agent")
    return x


# -- base-orderable matroids -------------------------------------------------


def _pad(inst):
    """Identical-matroid instance padded with zero-valued dummies to ``n * rank`` items."""
    if not inst.all_matroids or not inst.has_identical_constraints:
        raise CapabilityError("iterated swaps needs one matroid shared by all agents")
    m = inst.constraints[0]
    r = m.rank()
    if inst.m > inst.n * r:
        raise InputError(f"{inst.m} items cannot be split into {inst.n} independent sets of rank {r}")
    extended = free_extend(m, inst.n * r - inst.m)
    rows = [list(row) + [0] * len(extended.new_items) for row in inst.valuations]
    return Instance(rows, extended), extended, r


def _pad_allocation(x, padded, r, m0):
    bundles = [set(b) for b in x]
    if len(bundles) != padded.n or set().union(*bundles) != set(range(m0)) or sum(map(len, bundles)) != m0:
        raise InputError("initial allocation must partition all items among the agents")
    if any(len(b) > r for b in bundles):
        raise InputError(f"initial allocation has a bundle larger than the rank {r}")
    dummies = iter(range(m0, padded.m))
    for b in bundles:
        while len(b) < r:
            b.add(next(dummies))
    y = Allocation(bundles)
    report = check_feasible(y, padded)
    if not report.feasible:
        raise InputError("initial allocation is not feasible: " + "; ".join(report.violations()))
    return y


def _envies_beyond_one(inst, x, i, j):
    row = inst.valuations[i]
    top = max((row[g] for g in x[j]), default=0)
    return inst.value(i, x[i]) < inst.value(i, x[j]) - top


def _potential(inst, x):
    total = 0
    for i in inst.agents:
        own = inst.value(i, x[i])
        for j in inst.agents:
            if j != i:
                total += max(0, inst.value(i, x[j]) - own)
    return total


def _welfare(inst, x):
    return sum((inst.value(i, x[i]) for i in inst.agents), 0)


def _pick_binary(inst, x):
    for i in inst.agents:
        for j in inst.agents:
            if i != j and _envies_beyond_one(inst, x, i, j):
                return i, j
    return None


def _pick_identical(inst, x):
    v = [inst.value(0, b) for b in x]
    envious = [i for i in inst.agents if any(j != i and _envies_beyond_one(inst, x, i, j) for j in inst.agents)]
    if not envious:
        return None
    i = min(envious, key=lambda a: (v[a], a))
    targets = [j for j in inst.agents if j != i and _envies_beyond_one(inst, x, i, j)]
    j = min(targets, key=lambda b: (-v[b], b))
    return i, j


def iterated_swaps(inst, order=None, verify=False, trace=None, initial=None):
    """Swap single items along feasible-exchange bijections until the allocation is EF1.

    Starts from a welfare-maximizing allocation (or ``initial``) of the
    instance padded to ``n * rank`` items. Two regimes are supported:
    heterogeneous binary valuations for at most three agents (each swap
    gives the envious agent an item both agents want for one neither
    wants), and identical valuations for any number of agents (the envious
    agent with the lowest value swaps with the most valuable agent she
    envies, exchanging the pair with the largest value gain).
    """
    if inst.has_identical_valuations:
        mode = "identical"
    elif inst.is_binary and inst.n <= 3:
        mode = "binary"
    else:
        raise CapabilityError(
            "iterated swaps needs identical valuations, or binary valuations with at most three agents"
        )
    m0 = inst.m
    padded, matroid, r = _pad(inst)
    x = max_weight_swm(padded) if initial is None else _pad_allocation(initial, padded, r, m0)
    pick = _pick_binary if mode == "binary" else _pick_identical
    welfare = [_welfare(padded, x)]
    potential = [_potential(padded, x)]
    iterations = 0
    while True:
        pair = pick(padded, x)
        if pair is None:
            break
        i, j = pair
        mu = require_exchange_bijection(matroid, x[i], x[j])
        if mode == "binary":
            vi, vj = padded.valuations[i], padded.valuations[j]
            gi = next(
                (g for g in sorted(x[i]) if vi[g] == vj[g] == 0 and vi[mu[g]] == vj[mu[g]] == 1),
                None,
            )
            if gi is None:
                _fail(f"no smart swap between agents {i} and {j}; the allocation is not welfare-maximizing")
        else:
            v = padded.valuations[0]
            gi = max(sorted(x[i]), key=lambda g: v[mu[g]] - v[g])
            gain = v[mu[gi]] - v[gi]
            if verify and gain * m0 * m0 < padded.value(0, x[j]):
                _fail(f"best swap gains {gain}, below v(X_j)/m^2 for agents {i} and {j}")
        x = x.swap(i, gi, j, mu[gi])
        iterations += 1
        welfare.append(_welfare(padded, x))
        potential.append(_potential(padded, x))
        if trace is not None:
            trace.steps.append(("swap", i, j, gi, mu[gi]))
        if verify and mode == "binary":
            if welfare[-1] != welfare[-2]:
                _fail(f"welfare changed from {welfare[-2]} to {welfare[-1]}")
            if potential[-1] >= potential[-2]:
                _fail(f"potential did not decrease ({potential[-2]} -> {potential[-1]})")
            if iterations > m0:
                _fail(f"{iterations} iterations exceed m = {m0}")
    if trace is not None:
        trace.iterations = iterations
        trace.welfare = welfare
        trace.potential = potential
    return x.restrict(range(m0))


def cut_and_choose_two_agents(inst, order=None, verify=False, trace=None):
    """Split by iterated swaps under agent 0's valuation; agent 1 takes her preferred half.

    Ties go to the bundle whose smallest item id is lower.
    """
    if inst.n != 2:
        raise CapabilityError(f"cut-and-choose is defined for two agents, got {inst.n}")
    v0 = inst.valuations[0]
    virtual = Instance([v0, v0], inst.constraints[0])
    if not inst.has_identical_constraints:
        raise CapabilityError("cut-and-choose needs one matroid shared by both agents")
    halves = iterated_swaps(virtual, verify=verify, trace=trace)
    v1 = inst.valuations[1]

    def key(k):
        b = halves[k]
        return (-sum((v1[g] for g in b), 0), min(b, default=inst.m))

    pick = min((0, 1), key=key)
    return Allocation([halves[1 - pick], halves[pick]])


# -- dispatch ----------------------------------------------------------------


ALGORITHMS = {
    "crr": capped_round_robin,
    "back_and_forth_crr": back_and_forth_crr,
    "per_category_crr": per_category_crr,
    "per_category_rr": per_category_rr,
    "iterated_priority_matching": iterated_priority_matching,
    "rr_squared": rr_squared,
    "iterated_swaps": iterated_swaps,
    "cut_and_choose_two_agents": cut_and_choose_two_agents,
}

GUARANTEES = {
    "crr": "F-EF1; earlier agents in the order never feasibly envy later ones (single category)",
    "back_and_forth_crr": "F-EF1 for partition matroids with at most two shared categories",
    "per_category_crr": "F-EF1 and Pareto-efficient for identical valuations and shared categories",
    "per_category_rr": "EF1 for identical partition constraints (baseline)",
    "iterated_priority_matching": "F-EF1 for binary valuations and shared categories; "
    "welfare-maximizing when all capacities are 0 or 1",
    "rr_squared": "F-EF1 for two agents with shared categories; the first chooser is feasibly envy-free",
    "iterated_swaps": "EF1 for an identical base-orderable matroid (welfare-maximizing in the binary case)",
    "cut_and_choose_two_agents": "EF1 for two agents sharing a base-orderable matroid; "
    "the chooser is envy-free",
}


@dataclass
class Solution:
    allocation: Allocation
    algorithm: str
    guarantee: str
    trace: Trace


def _refuse_set_system(inst):
    kinds = {type(c) for c in inst.constraints if not hasattr(c, "rank")}
    if BipartiteMatchingConstraint in kinds:
        ref = "matching-complementary"
    elif ConflictGraphConstraint in kinds:
        ref = "conflict-graph-cycle"
    elif BudgetConstraint in kinds:
        ref = "budget-complementary"
    else:
        ref = None
    raise CapabilityError(
        "constraints that are not matroids can force two items together, "
        "so an EF1 allocation may not exist",
        reference=ref,
    )


def choose_algorithm(inst):
    """Name of the strongest applicable algorithm, or a :class:`CapabilityError`."""
    if not inst.all_matroids:
        _refuse_set_system(inst)
    if all(isinstance(c, PartitionMatroid) for c in inst.constraints):
        if not inst.has_identical_categories:
            raise CapabilityError(
                "partition matroids with different categories per agent may admit no F-EF1 allocation",
                reference="heterogeneous-categories",
            )
        categories, _ = inst.partition_structure()
        if inst.has_identical_valuations:
            return "per_category_crr"
        if inst.is_binary:
            return "iterated_priority_matching"
        if len(categories) <= 2:
            return "back_and_forth_crr"
        if inst.n == 2:
            return "rr_squared"
        raise CapabilityError(
            "open problem: three or more agents with additive valuations, "
            "heterogeneous capacities and three or more categories"
        )
    if not inst.has_identical_constraints:
        raise CapabilityError("open problem: heterogeneous matroid constraints beyond partition matroids")
    if inst.has_identical_valuations:
        return "iterated_swaps"
    if inst.n == 2:
        return "cut_and_choose_two_agents"
    if inst.is_binary and inst.n == 3:
        return "iterated_swaps"
    raise CapabilityError(
        "open problem: base-orderable matroids with additive valuations for three or more agents "
        "(binary valuations are handled for exactly three)"
    )


def solve(inst, algorithm=None, order=None, verify=False):
    """Run ``algorithm`` (or the dispatcher's choice) and return a :class:`Solution`."""
    name = algorithm or choose_algorithm(inst)
    if name not in ALGORITHMS:
        raise InputError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
    trace = Trace()
    x = ALGORITHMS[name](inst, order=order, verify=verify, trace=trace)
    if verify:
        report = check_feasible(x, inst)
        if not report.feasible:
            _fail(f"{name} returned an infeasible allocation: {report.violations()}")
    return Solution(x, name, GUARANTEES[name], trace)


def dispatch(inst, verify=False):
    return solve(inst, verify=verify).allocation


__all__ = [
    "ALGORITHMS",
    "GUARANTEES",
    "NotBaseOrderableError",
    "Solution",
    "Trace",
    "back_and_forth_crr",
    "capped_round_robin",
    "category_orders",
    "choose_algorithm",
    "crr",
    "crr_single_category",
    "cut_and_choose_two_agents",
    "dispatch",
    "iterated_priority_matching",
    "iterated_swaps",
    "per_category_crr",
    "per_category_rr",
    "rr_squared",
    "solve",
    "surplus",
]
