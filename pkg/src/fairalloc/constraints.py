"""Downward-closed set systems that are not matroids, and complementary items.

A pair of items is *complementary* when every partition of the ground set
into two feasible sets keeps the pair on the same side. Two agents who both
value exactly that pair then cannot be made EF1.
"""

from itertools import combinations

from .errors import CapabilityError, InputError, NoFeasiblePartitionError
from .matroid import Matroid

#: complementary_pairs enumerates 2^(m-1) partitions.
PARTITION_LIMIT = 20


class SetSystem:
    """A family of feasible item sets given by a membership query."""

    kind = "custom"

    def __init__(self, ground_set, predicate=None, downward_closed=True):
        self.ground_set = tuple(sorted(set(ground_set)))
        self._ground = frozenset(self.ground_set)
        self._predicate = predicate
        self._downward_closed = downward_closed

    @property
    def is_downward_closed(self):
        return self._downward_closed

    def _items(self, s):
        s = frozenset(s)
        if not s <= self._ground:
            raise InputError(f"unknown item ids {sorted(s - self._ground)} for {self.kind} constraint")
        return s

    def is_feasible(self, s):
        return self._feasible(self._items(s))

    def _feasible(self, s):
        return bool(self._predicate(s))

    def _key(self):
        return (id(self),)

    def __eq__(self, other):
        if not isinstance(other, SetSystem):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


class BudgetConstraint(SetSystem):
    """Feasible iff the total cost is within the budget."""

    kind = "budget"

    def __init__(self, costs, budget):
        costs = dict(costs) if isinstance(costs, dict) else dict(enumerate(costs))
        if any(c < 0 for c in costs.values()) or budget < 0:
            raise InputError("costs and budget must be non-negative")
        super().__init__(costs)
        self.costs = costs
        self.budget = budget

    def _feasible(self, s):
        return sum(self.costs[g] for g in s) <= self.budget

    def _key(self):
        return ("budget", frozenset(self.costs.items()), self.budget)


class ConflictGraphConstraint(SetSystem):
    """Items are vertices; feasible sets contain no conflict edge."""

    kind = "conflict_graph"

    def __init__(self, items, edges):
        super().__init__(items)
        self.edges = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
        for u, v in self.edges:
            if u not in self._ground or v not in self._ground:
                raise InputError(f"conflict edge ({u}, {v}) references an unknown item")

    def _feasible(self, s):
        return not any(u in s and v in s for u, v in self.edges)

    def _key(self):
        return ("conflict_graph", self.ground_set, self.edges)


class MatroidIntersection(SetSystem):
    """Feasible iff independent in both matroids."""

    kind = "matroid_intersection"

    def __init__(self, first, second):
        if first.ground_set != second.ground_set:
            raise InputError("intersected matroids must share a ground set")
        super().__init__(first.ground_set)
        self.first = first
        self.second = second

    def _feasible(self, s):
        return self.first._independent(s) and self.second._independent(s)

    def _key(self):
        return ("matroid_intersection", self.first._key(), self.second._key())


class BipartiteMatchingConstraint(SetSystem):
    """Items are edges ``(left, right)`` of a bipartite graph; feasible sets are matchings."""

    kind = "bipartite_matching"

    def __init__(self, edges):
        self.edges = tuple((u, v) for u, v in edges)
        super().__init__(range(len(self.edges)))

    def _feasible(self, s):
        lefts = [self.edges[g][0] for g in s]
        rights = [self.edges[g][1] for g in s]
        return len(set(lefts)) == len(lefts) and len(set(rights)) == len(rights)

    def _key(self):
        return ("bipartite_matching", self.edges)


def _query(constraint):
    if isinstance(constraint, Matroid):
        return constraint._independent
    return constraint._feasible


def feasible_partitions(s):
    """All ordered-canonical 2-partitions (A, B) of the ground set with both sides feasible.

    The lowest item id is pinned to ``A``.
    """
    ground = s.ground_set
    if len(ground) > PARTITION_LIMIT:
        raise CapabilityError(f"{len(ground)} items exceed the partition limit {PARTITION_LIMIT}")
    if not ground:
        return [(frozenset(), frozenset())]
    feasible = _query(s)
    first, rest = ground[0], ground[1:]
    everything = frozenset(ground)
    out = []
    for k in range(len(rest) + 1):
        for combo in combinations(rest, k):
            a = frozenset(combo) | {first}
            b = everything - a
            if feasible(a) and feasible(b):
                out.append((a, b))
    return out


def complementary_pairs(s):
    """Pairs ``(x, y)``, ``x < y``, that every feasible 2-partition keeps together."""
    partitions = feasible_partitions(s)
    if not partitions:
        raise NoFeasiblePartitionError("no partition into two feasible sets exists")
    pairs = []
    for x, y in combinations(s.ground_set, 2):
        if all((x in a) == (y in a) for a, _ in partitions):
            pairs.append((x, y))
    return pairs


def no_ef1_witness(s, pair):
    """Two-agent instance, both valuing only ``pair`` (at 1), with shared constraint ``s``."""
    from .model import Instance

    x, y = sorted(pair)
    if (x, y) not in complementary_pairs(s):
        raise InputError(f"items {x} and {y} are not complementary")
    m = len(s.ground_set)
    if tuple(s.ground_set) != tuple(range(m)):
        raise InputError("witness instances need item ids 0..m-1")
    row = [1 if g in (x, y) else 0 for g in range(m)]
    return Instance([row, list(row)], s, name=f"no-ef1-witness-{x}-{y}")
