"""Matroids given by independence oracles.

Every algorithm in the package talks to constraints only through
``is_independent`` (aliased ``is_feasible``), so any object implementing
that query over a finite ground set of integer item ids plugs in.
"""

from itertools import combinations

from .errors import CapabilityError, InputError, NotBaseOrderableError
from .matching import max_matching

#: Exponential helpers refuse ground sets larger than this.
ENUMERATION_LIMIT = 12


class Matroid:
    """Base class: a finite ground set plus an independence oracle.

    Subclasses implement :meth:`_independent` on a frozenset that is already
    known to lie inside the ground set, and :meth:`_key` for equality.
    Instances are immutable after construction.
    """

    kind = "custom"

    def __init__(self, ground_set):
        self.ground_set = tuple(sorted(set(ground_set)))
        self._ground = frozenset(self.ground_set)
        self._rank = None

    def _items(self, s):
        s = frozenset(s)
        if not s <= self._ground:
            unknown = sorted(s - self._ground)
            raise InputError(f"unknown item ids {unknown} for {self.kind} matroid")
        return s

    def is_independent(self, s):
        return self._independent(self._items(s))

    def is_feasible(self, s):
        return self.is_independent(s)

    def _independent(self, s):
        raise NotImplementedError

    def rank(self, s=None):
        """Size of a maximal independent subset of ``s`` (whole ground set by default)."""
        if s is None:
            if self._rank is None:
                self._rank = _greedy_rank(self, self.ground_set)
            return self._rank
        return _greedy_rank(self, sorted(self._items(s)))

    @property
    def is_downward_closed(self):
        return True

    def _key(self):
        return (id(self),)

    def __eq__(self, other):
        if not isinstance(other, Matroid):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"{type(self).__name__}(ground_set={list(self.ground_set)})"


def _greedy_rank(m, ordered_items):
    current = set()
    for g in ordered_items:
        current.add(g)
        if not m._independent(frozenset(current)):
            current.discard(g)
    return len(current)


class PartitionMatroid(Matroid):
    """Categories with capacities: at most ``capacities[h]`` items from ``categories[h]``."""

    kind = "partition"

    def __init__(self, categories, capacities):
        categories = tuple(frozenset(c) for c in categories)
        capacities = tuple(int(k) for k in capacities)
        if len(categories) != len(capacities):
            raise InputError("one capacity per category is required")
        if any(k < 0 for k in capacities):
            raise InputError("capacities must be non-negative")
        category_of = {}
        for h, cat in enumerate(categories):
            for g in cat:
                if g in category_of:
                    raise InputError(f"item {g} appears in two categories")
                category_of[g] = h
        super().__init__(category_of)
        self.categories = categories
        self.capacities = capacities
        self.category_of = category_of

    def _independent(self, s):
        counts = [0] * len(self.categories)
        for g in s:
            h = self.category_of[g]
            counts[h] += 1
            if counts[h] > self.capacities[h]:
                return False
        return True

    def capacity_for(self, category):
        """Capacity of the category equal (as a set) to ``category``."""
        category = frozenset(category)
        for cat, k in zip(self.categories, self.capacities):
            if cat == category:
                return k
        raise InputError("category not present in this matroid")

    def _key(self):
        return ("partition", frozenset(zip(self.categories, self.capacities)))

    def __repr__(self):
        cats = [sorted(c) for c in self.categories]
        return f"{type(self).__name__}(categories={cats}, capacities={list(self.capacities)})"


class UniformMatroid(PartitionMatroid):
    """Every set of at most ``capacity`` items is independent."""

    kind = "uniform"

    def __init__(self, items, capacity):
        super().__init__([items], [capacity])

    @property
    def capacity(self):
        return self.capacities[0]

    def __repr__(self):
        return f"UniformMatroid(items={list(self.ground_set)}, capacity={self.capacity})"


class LaminarMatroid(Matroid):
    """Capacities on a laminar family (any two sets nested or disjoint) covering the items."""

    kind = "laminar"

    def __init__(self, sets, capacities):
        sets = tuple(frozenset(c) for c in sets)
        capacities = tuple(int(k) for k in capacities)
        if len(sets) != len(capacities):
            raise InputError("one capacity per set is required")
        if any(k < 0 for k in capacities):
            raise InputError("capacities must be non-negative")
        for a, b in combinations(sets, 2):
            if a & b and not (a <= b or b <= a):
                raise InputError(f"sets {sorted(a)} and {sorted(b)} are neither nested nor disjoint")
        super().__init__(frozenset().union(*sets))
        self.sets = sets
        self.capacities = capacities

    def _independent(self, s):
        return all(len(s & c) <= k for c, k in zip(self.sets, self.capacities))

    def _key(self):
        return ("laminar", frozenset(zip(self.sets, self.capacities)))


class TransversalMatroid(Matroid):
    """Items are left vertices of a bipartite graph; independent = matchable."""

    kind = "transversal"

    def __init__(self, adjacency):
        self.adjacency = {g: frozenset(vs) for g, vs in dict(adjacency).items()}
        super().__init__(self.adjacency)

    def _independent(self, s):
        if any(not self.adjacency[g] for g in s):
            return False
        return len(max_matching({g: self.adjacency[g] for g in s})) == len(s)

    def _key(self):
        return ("transversal", frozenset(self.adjacency.items()))


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


class GraphicMatroid(Matroid):
    """Edges of a multigraph; a set of edges is independent iff it is a forest.

    Edge ``e`` has item id ``e`` (its position in ``edges``).
    """

    kind = "graphic"

    def __init__(self, n_vertices, edges):
        self.n_vertices = int(n_vertices)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        for u, v in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise InputError(f"edge ({u}, {v}) references a missing vertex")
        super().__init__(range(len(self.edges)))

    def _independent(self, s):
        uf = UnionFind(self.n_vertices)
        return all(uf.union(*self.edges[e]) for e in s)

    def _key(self):
        return ("graphic", self.n_vertices, self.edges)


class FreeExtension(Matroid):
    """Iterated free extension of ``base`` by the dummy items ``new_items``.

    A set holding ``k`` dummies is independent iff its remaining items are
    independent in ``base`` and number at most ``rank(base) - k``.
    """

    kind = "free_extension"

    def __init__(self, base, new_items):
        new_items = tuple(new_items)
        if set(new_items) & set(base.ground_set) or len(set(new_items)) != len(new_items):
            raise InputError("dummy items must be fresh and distinct")
        super().__init__(tuple(base.ground_set) + new_items)
        self.base = base
        self.new_items = new_items
        self._dummies = frozenset(new_items)
        self._base_rank = base.rank()

    def _independent(self, s):
        core = s - self._dummies
        k = len(s) - len(core)
        if not self.base._independent(core):
            return False
        return k == 0 or len(core) + k <= self._base_rank

    def _key(self):
        return ("free_extension", self.base._key(), self.new_items)


class CustomMatroid(Matroid):
    """Wraps an arbitrary independence predicate (trusted to be a matroid)."""

    def __init__(self, ground_set, predicate, name="custom"):
        super().__init__(ground_set)
        self._predicate = predicate
        self.name = name

    def _independent(self, s):
        return bool(self._predicate(s))


# -- operations --------------------------------------------------------------


def rank(m, s=None):
    return m.rank(s)


def augment(m, s, t):
    """An item ``g`` of ``t - s`` with ``s + g`` independent (lowest id wins)."""
    s, t = m._items(s), m._items(t)
    if not (m._independent(s) and m._independent(t)):
        raise InputError("augment needs two independent sets")
    if len(s) >= len(t):
        raise InputError("augment needs |s| < |t|")
    for g in sorted(t - s):
        if m._independent(s | {g}):
            return g
    raise AssertionError(f"augmentation property fails for {m!r}")


def is_basis(m, s):
    s = m._items(s)
    return len(s) == m.rank() and m._independent(s)


def bases(m, limit=ENUMERATION_LIMIT):
    """All bases, in lexicographic order of sorted item tuples."""
    _guard(m, limit)
    r = m.rank()
    return [frozenset(c) for c in combinations(m.ground_set, r) if m._independent(frozenset(c))]


def independent_sets(m, limit=ENUMERATION_LIMIT):
    _guard(m, limit)
    out = []
    for k in range(len(m.ground_set) + 1):
        out.extend(frozenset(c) for c in combinations(m.ground_set, k) if m._independent(frozenset(c)))
    return out


def _guard(m, limit):
    if len(m.ground_set) > limit:
        raise CapabilityError(
            f"ground set of {len(m.ground_set)} items exceeds the enumeration limit {limit}"
        )


def swap_graph(m, i_base, j_base):
    """x ~ y iff swapping x (from I) with y (from J) keeps both sets independent."""
    adj = {}
    for x in sorted(i_base):
        row = []
        for y in sorted(j_base):
            if m._independent((i_base - {x}) | {y}) and m._independent((j_base - {y}) | {x}):
                row.append(y)
        adj[x] = row
    return adj


def feasible_exchange_bijection(m, i_base, j_base):
    """A bijection ``mu: I -> J`` whose every pair is a feasible swap, or ``None``.

    Found as a perfect matching of the swap graph.
    """
    i_base, j_base = m._items(i_base), m._items(j_base)
    if not (is_basis(m, i_base) and is_basis(m, j_base)):
        raise InputError("feasible_exchange_bijection needs two bases")
    mu = max_matching(swap_graph(m, i_base, j_base))
    if len(mu) < len(i_base):
        return None
    for x, y in mu.items():
        assert m._independent((i_base - {x}) | {y}) and m._independent((j_base - {y}) | {x})
    return mu


def require_exchange_bijection(m, i_base, j_base):
    mu = feasible_exchange_bijection(m, i_base, j_base)
    if mu is None:
        raise NotBaseOrderableError(
            f"bases {sorted(i_base)} and {sorted(j_base)} have no feasible-exchange bijection",
            bases=(frozenset(i_base), frozenset(j_base)),
        )
    return mu


def free_extend(m, count):
    """Free extension by ``count`` fresh dummy items numbered after the ground set."""
    if count < 0:
        raise InputError("count must be non-negative")
    start = max(m.ground_set, default=-1) + 1
    return FreeExtension(m, range(start, start + count))


def is_base_orderable(m, limit=ENUMERATION_LIMIT):
    """Exhaustive test: every pair of bases has a feasible-exchange bijection."""
    all_bases = bases(m, limit)
    for a in range(len(all_bases)):
        for b in range(a + 1, len(all_bases)):
            if feasible_exchange_bijection(m, all_bases[a], all_bases[b]) is None:
                return False
    return True


def check_axioms(m, limit=10):
    """Exhaustively verify the matroid axioms; returns a violation message or None."""
    indep = set(independent_sets(m, limit))
    if frozenset() not in indep:
        return "empty set is dependent"
    for s in indep:
        for g in s:
            if s - {g} not in indep:
                return f"{sorted(s)} is independent but {sorted(s - {g})} is not"
    by_size = {}
    for s in indep:
        by_size.setdefault(len(s), []).append(s)
    for k, smaller in by_size.items():
        for s in smaller:
            for t in by_size.get(k + 1, ()):
                if not any(s | {g} in indep for g in t - s):
                    return f"cannot augment {sorted(s)} from {sorted(t)}"
    return None
