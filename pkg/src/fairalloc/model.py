"""Instances, allocations and feasibility checks.

Items are dense integers ``0..m-1`` and agents ``0..n-1``. Values are kept
exact: Python ints when integral, :class:`fractions.Fraction` otherwise, so
envy comparisons never depend on rounding.
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .constraints import SetSystem
from .errors import CapabilityError, InputError
from .matroid import Matroid, PartitionMatroid


def exact(x):
    """Convert a number (or ``"p/q"`` string) to an exact non-negative value."""
    if isinstance(x, bool):
        raise InputError("booleans are not valuations")
    if isinstance(x, int):
        v = x
    elif isinstance(x, Rational):
        v = Fraction(x)
    elif isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise InputError(f"non-finite value {x!r}")
        v = Fraction(repr(x))
    elif isinstance(x, str):
        try:
            v = Fraction(x.strip())
        except ValueError:
            raise InputError(f"cannot parse value {x!r}") from None
    else:
        try:
            v = Fraction(x)
        except (TypeError, ValueError):
            raise InputError(f"cannot interpret {x!r} as a value") from None
    if isinstance(v, Fraction) and v.denominator == 1:
        v = v.numerator
    if v < 0:
        raise InputError(f"negative value {x!r}; only goods are supported")
    return v


class Instance:
    """Agents with additive valuations and one feasibility constraint each.

    ``constraints`` is either a single constraint shared by all agents or a
    sequence with one constraint per agent. Each constraint's ground set must
    be exactly the items ``0..m-1``.
    """

    def __init__(self, valuations, constraints, *, agent_names=None, item_names=None, name=None):
        rows = [tuple(exact(v) for v in row) for row in valuations]
        if not rows:
            raise InputError("an instance needs at least one agent")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise InputError("valuation rows must all have one entry per item")
        self.valuations = tuple(rows)
        self.n = len(rows)
        self.m = m
        if isinstance(constraints, (Matroid, SetSystem)):
            constraints = [constraints] * self.n
        constraints = tuple(constraints)
        if len(constraints) != self.n:
            raise InputError(f"expected {self.n} constraints, got {len(constraints)}")
        for i, c in enumerate(constraints):
            if not isinstance(c, (Matroid, SetSystem)):
                raise InputError(f"constraint of agent {i} is not a matroid or set system")
            if tuple(c.ground_set) != tuple(range(m)):
                raise InputError(f"constraint of agent {i} does not cover exactly items 0..{m - 1}")
        self.constraints = constraints
        self.agent_names = tuple(agent_names) if agent_names is not None else None
        self.item_names = tuple(item_names) if item_names is not None else None
        for names, size, what in ((self.agent_names, self.n, "agent"), (self.item_names, m, "item")):
            if names is not None and len(names) != size:
                raise InputError(f"{what}_names has the wrong length")
        self.name = name
        self._partition = None

    @property
    def agents(self):
        return range(self.n)

    @property
    def items(self):
        return range(self.m)

    def value(self, i, s):
        row = self.valuations[i]
        return sum((row[g] for g in s), 0)

    def is_feasible_bundle(self, i, s):
        c = self.constraints[i]
        return c._independent(frozenset(s)) if isinstance(c, Matroid) else c._feasible(frozenset(s))

    @property
    def is_binary(self):
        return all(v in (0, 1) for row in self.valuations for v in row)

    @property
    def has_identical_valuations(self):
        return all(row == self.valuations[0] for row in self.valuations)

    @property
    def has_identical_constraints(self):
        first = self.constraints[0]
        return all(c is first or c == first for c in self.constraints)

    @property
    def all_matroids(self):
        return all(isinstance(c, Matroid) for c in self.constraints)

    @property
    def is_partition(self):
        return all(isinstance(c, PartitionMatroid) for c in self.constraints)

    @property
    def has_identical_categories(self):
        if not self.is_partition:
            return False
        cats = set(self.constraints[0].categories)
        return all(set(c.categories) == cats for c in self.constraints)

    def partition_structure(self):
        """``(categories, capacities)`` for partition matroids with shared categories.

        Categories follow the first agent's order; ``capacities[i][h]`` is
        agent ``i``'s capacity in category ``h``.
        """
        if self._partition is None:
            if not self.has_identical_categories:
                raise CapabilityError(
                    "needs partition matroids with identical categories",
                    reference="heterogeneous-categories",
                )
            categories = self.constraints[0].categories
            caps = tuple(tuple(c.capacity_for(cat) for cat in categories) for c in self.constraints)
            self._partition = (categories, caps)
        return self._partition

    def desired_set(self, i):
        """Items agent ``i`` values at 1 (binary instances only)."""
        if not self.is_binary:
            raise CapabilityError("desired sets are defined for binary valuations only")
        return frozenset(g for g, v in enumerate(self.valuations[i]) if v == 1)

    def max_value(self):
        return max((v for row in self.valuations for v in row), default=0)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.valuations == other.valuations
            and self.constraints == other.constraints
            and self.agent_names == other.agent_names
            and self.item_names == other.item_names
            and self.name == other.name
        )

    def __hash__(self):
        return hash((self.valuations, self.constraints))

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<Instance{label} n={self.n} m={self.m}>"


class Allocation:
    """An ordered tuple of bundles, one per agent."""

    __slots__ = ("bundles",)

    def __init__(self, bundles):
        self.bundles = tuple(frozenset(b) for b in bundles)

    def __len__(self):
        return len(self.bundles)

    def __getitem__(self, i):
        return self.bundles[i]

    def __iter__(self):
        return iter(self.bundles)

    def __eq__(self, other):
        if isinstance(other, Allocation):
            return self.bundles == other.bundles
        return NotImplemented

    def __hash__(self):
        return hash(self.bundles)

    def __repr__(self):
        return f"Allocation({self.to_lists()})"

    def to_lists(self):
        return [sorted(b) for b in self.bundles]

    def owners(self, m):
        """Owner agent of each item (``-1`` when unallocated)."""
        out = [-1] * m
        for i, b in enumerate(self.bundles):
            for g in b:
                out[g] = i
        return out

    def restrict(self, items):
        items = frozenset(items)
        return Allocation(b & items for b in self.bundles)

    def swap(self, i, gi, j, gj):
        bundles = list(self.bundles)
        bundles[i] = (bundles[i] - {gi}) | {gj}
        bundles[j] = (bundles[j] - {gj}) | {gi}
        return Allocation(bundles)

    @classmethod
    def from_owners(cls, owners, n):
        bundles = [[] for _ in range(n)]
        for g, i in enumerate(owners):
            if i >= 0:
                bundles[i].append(g)
        return cls(bundles)


@dataclass(frozen=True)
class FeasibilityReport:
    n_bundles_ok: bool
    unknown_items: tuple
    overlapping_items: tuple
    missing_items: tuple
    independent: tuple

    @property
    def disjoint(self):
        return not self.overlapping_items

    @property
    def complete(self):
        return not self.missing_items

    @property
    def individually_feasible(self):
        return all(self.independent)

    @property
    def feasible(self):
        return (
            self.n_bundles_ok
            and not self.unknown_items
            and self.disjoint
            and self.complete
            and self.individually_feasible
        )

    def violations(self):
        out = []
        if not self.n_bundles_ok:
            out.append("wrong number of bundles")
        if self.unknown_items:
            out.append(f"unknown items {list(self.unknown_items)}")
        if self.overlapping_items:
            out.append(f"items in several bundles {list(self.overlapping_items)}")
        if self.missing_items:
            out.append(f"unallocated items {list(self.missing_items)}")
        bad = [i for i, ok in enumerate(self.independent) if not ok]
        if bad:
            out.append(f"infeasible bundles for agents {bad}")
        return out


def value(inst, i, s):
    return inst.value(i, s)


def check_feasible(x, inst):
    """Disjointness, completeness and per-agent feasibility of an allocation."""
    items = set(inst.items)
    seen, overlaps, unknown = set(), set(), set()
    for b in x:
        for g in b:
            if g not in items:
                unknown.add(g)
            elif g in seen:
                overlaps.add(g)
            seen.add(g)
    independent = []
    for i, b in enumerate(x.bundles[: inst.n]):
        independent.append(not (b - items) and inst.is_feasible_bundle(i, b))
    return FeasibilityReport(
        n_bundles_ok=len(x) == inst.n,
        unknown_items=tuple(sorted(unknown)),
        overlapping_items=tuple(sorted(overlaps)),
        missing_items=tuple(sorted(items - seen)),
        independent=tuple(independent),
    )


def require_feasible(x, inst):
    report = check_feasible(x, inst)
    if not report.feasible:
        raise InputError("allocation is not feasible: " + "; ".join(report.violations()))


#: brute-force existence search refuses more assignments than this.
SEARCH_LIMIT = 10**6


def has_complete_allocation(inst):
    """Whether some complete feasible allocation exists.

    Returns ``None`` when the question is too large to settle (non-matroid
    constraints beyond the search limit).
    """
    if inst.has_identical_categories:
        categories, caps = inst.partition_structure()
        return all(sum(caps[i][h] for i in inst.agents) >= len(cat) for h, cat in enumerate(categories))
    if inst.all_matroids:
        from .optimize import max_cardinality_bundles

        return sum(len(b) for b in max_cardinality_bundles(inst)) == inst.m
    if inst.n ** inst.m > SEARCH_LIMIT:
        return None
    return _backtrack_exists(inst)


def _backtrack_exists(inst):
    bundles = [set() for _ in inst.agents]
    prune = all(c.is_downward_closed for c in inst.constraints)

    def go(g):
        if g == inst.m:
            return all(inst.is_feasible_bundle(i, b) for i, b in enumerate(bundles))
        for i in inst.agents:
            bundles[i].add(g)
            if not prune or inst.is_feasible_bundle(i, bundles[i]):
                if go(g + 1):
                    return True
            bundles[i].discard(g)
        return False

    return go(0)

