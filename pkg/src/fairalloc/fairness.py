"""Feasible valuations, envy notions, envy graphs, Nash welfare and Pareto checks."""

import enum
import heapq
from dataclasses import dataclass, field
from itertools import combinations

from .errors import CapabilityError
from .matroid import Matroid, PartitionMatroid
from .model import Allocation, require_feasible

#: Exhaustive best-subset search for non-matroid constraints.
SUBSET_LIMIT = 20


def best_feasible_subset(inst, i, t):
    """A maximum-value feasible subset of ``t`` for agent ``i``.

    Matroids use the greedy rule (descending value, lowest id first), which
    is optimal for additive weights. Other set systems are searched
    exhaustively.
    """
    row = inst.valuations[i]
    c = inst.constraints[i]
    order = sorted(t, key=lambda g: (-row[g], g))
    if isinstance(c, PartitionMatroid):
        used = [0] * len(c.categories)
        chosen = []
        for g in order:
            h = c.category_of[g]
            if used[h] < c.capacities[h]:
                used[h] += 1
                chosen.append(g)
        return frozenset(chosen)
    if isinstance(c, Matroid):
        chosen = set()
        for g in order:
            chosen.add(g)
            if not c._independent(frozenset(chosen)):
                chosen.discard(g)
        return frozenset(chosen)
    return _exhaustive_best(c, row, order)


def _exhaustive_best(c, row, order):
    if len(order) > SUBSET_LIMIT:
        raise CapabilityError(
            f"best subset over {len(order)} items under a non-matroid constraint exceeds {SUBSET_LIMIT}"
        )
    best, best_value = frozenset(), -1
    for k in range(len(order), -1, -1):
        for combo in combinations(order, k):
            s = frozenset(combo)
            v = sum((row[g] for g in s), 0)
            if v > best_value and c._feasible(s):
                best, best_value = s, v
    return best


def feasible_value(inst, i, t):
    """F_i(t): the value of agent ``i``'s best feasible subset of ``t``."""
    return inst.value(i, best_feasible_subset(inst, i, t))


@dataclass(frozen=True)
class Verdict:
    """Boolean verdict; ``witness`` is an offending ``(i, j)`` pair on failure."""

    holds: bool
    witness: tuple = None

    def __bool__(self):
        return self.holds


def _first_failure(x, inst, pair_ok):
    for i in inst.agents:
        for j in inst.agents:
            if i != j and not pair_ok(i, j):
                return Verdict(False, (i, j))
    return Verdict(True)


def _fef1_pair(inst, x, i, j, own=None):
    own = feasible_value(inst, i, x[i]) if own is None else own
    other = x[j]
    if own >= feasible_value(inst, i, other):
        return True
    row = inst.valuations[i]
    for g in sorted(other, key=lambda g: (-row[g], g)):
        if own >= feasible_value(inst, i, other - {g}):
            return True
    return False


def is_fef1(x, inst):
    """Envy-free up to one good with respect to feasible valuations.

    For every ``i, j`` some ``Y`` of at most one item of ``X_j`` gives
    ``F_i(X_i) >= F_i(X_j - Y)``.
    """
    require_feasible(x, inst)
    return _first_failure(x, inst, lambda i, j: _fef1_pair(inst, x, i, j))


def is_fef(x, inst):
    require_feasible(x, inst)
    return _first_failure(
        x, inst, lambda i, j: feasible_value(inst, i, x[i]) >= feasible_value(inst, i, x[j])
    )


def is_weak_fef1(x, inst):
    """Compare against the greedy best subset of ``X_j`` minus its most valuable item."""
    require_feasible(x, inst)

    def ok(i, j):
        best = best_feasible_subset(inst, i, x[j])
        row = inst.valuations[i]
        top = max((row[g] for g in best), default=0)
        return feasible_value(inst, i, x[i]) >= inst.value(i, best) - top

    return _first_failure(x, inst, ok)


def is_efx(x, inst):
    """Envy-free up to any good.

    Identical constraints use plain values; heterogeneous constraints use
    feasible values on both sides.
    """
    require_feasible(x, inst)
    plain = inst.has_identical_constraints

    def ok(i, j):
        if plain:
            own = inst.value(i, x[i])
            total = inst.value(i, x[j])
            return all(own >= total - inst.valuations[i][g] for g in x[j])
        own = feasible_value(inst, i, x[i])
        return all(own >= feasible_value(inst, i, x[j] - {g}) for g in x[j])

    return _first_failure(x, inst, ok)


def is_ef1(x, inst):
    """Plain EF1, ignoring the constraints."""

    def ok(i, j):
        row = inst.valuations[i]
        top = max((row[g] for g in x[j]), default=0)
        return inst.value(i, x[i]) >= inst.value(i, x[j]) - top

    return _first_failure(x, inst, ok)


def is_ef(x, inst):
    return _first_failure(x, inst, lambda i, j: inst.value(i, x[i]) >= inst.value(i, x[j]))


def positive_feasible_envy(x, inst):
    """Matrix ``e[i][j] = max(0, F_i(X_j) - F_i(X_i))``; works on partial allocations too."""
    out = []
    for i in inst.agents:
        own = feasible_value(inst, i, x[i])
        out.append([0 if i == j else max(0, feasible_value(inst, i, x[j]) - own) for j in inst.agents])
    return out


def nash_welfare(x, inst):
    """Product of the agents' values (monotone in the geometric mean)."""
    p = 1
    for i in inst.agents:
        p *= inst.value(i, x[i])
    return p


def social_welfare(x, inst):
    return sum((inst.value(i, x[i]) for i in inst.agents), 0)


class CycleError(Exception):
    def __init__(self, cycle):
        super().__init__(f"envy cycle {cycle}")
        self.cycle = cycle


@dataclass(frozen=True)
class EnvyGraph:
    """Directed graph with an edge ``i -> j`` when ``i`` envies ``j``."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def successors(self, i):
        return sorted(j for a, j in self.edges if a == i)

    def find_cycle(self):
        """A cycle ``[c0, ..., ck]`` (edges ``c_t -> c_t+1`` and back to ``c0``) or ``None``."""
        succ = {i: self.successors(i) for i in range(self.n)}
        state = [0] * self.n
        stack = []

        def dfs(u):
            state[u] = 1
            stack.append(u)
            for v in succ[u]:
                if state[v] == 1:
                    return stack[stack.index(v):]
                if state[v] == 0:
                    found = dfs(v)
                    if found:
                        return found
            stack.pop()
            state[u] = 2
            return None

        for s in range(self.n):
            if state[s] == 0:
                found = dfs(s)
                if found:
                    return list(found)
        return None

    def is_acyclic(self):
        return self.find_cycle() is None

    def topological_order(self, priority=None):
        """Agents ordered so that every envious agent precedes the agents it envies.

        Ties go to the agent listed first in ``priority`` (default: lowest id).
        Raises :class:`CycleError` on a cycle.
        """
        rank = {a: k for k, a in enumerate(priority if priority is not None else range(self.n))}
        indegree = [0] * self.n
        for _, j in self.edges:
            indegree[j] += 1
        heap = [(rank[i], i) for i in range(self.n) if indegree[i] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            _, u = heapq.heappop(heap)
            order.append(u)
            for v in self.successors(u):
                indegree[v] -= 1
                if indegree[v] == 0:
                    heapq.heappush(heap, (rank[v], v))
        if len(order) < self.n:
            raise CycleError(self.find_cycle())
        return order


def envy_graph(x, inst, feasible=True):
    """Envy graph of a (possibly partial) allocation; ``feasible`` selects F_i over v_i."""
    edges = set()
    for i in inst.agents:
        if feasible:
            own = feasible_value(inst, i, x[i])
            worth = [feasible_value(inst, i, x[j]) for j in inst.agents]
        else:
            own = inst.value(i, x[i])
            worth = [inst.value(i, x[j]) for j in inst.agents]
        edges.update((i, j) for j in inst.agents if j != i and own < worth[j])
    return EnvyGraph(inst.n, frozenset(edges))


def topological_order(g, priority=None):
    return g.topological_order(priority)


class Pareto(enum.Enum):
    EFFICIENT = "efficient"
    DOMINATED = "dominated"
    EFFICIENT_SWM = "efficient (welfare-maximizing)"
    UNKNOWN = "unknown"

    @property
    def is_efficient(self):
        if self is Pareto.UNKNOWN:
            return None
        return self is not Pareto.DOMINATED


#: Default cap on n**m for exhaustive Pareto checks.
PARETO_BOUND = 10**6


def pareto_improvement(x, inst):
    """A feasible allocation Pareto-dominating ``x``, or ``None`` (exhaustive)."""
    from .oracle import enumerate_feasible

    base = [inst.value(i, x[i]) for i in inst.agents]
    for y in enumerate_feasible(inst):
        vals = [inst.value(i, y[i]) for i in inst.agents]
        if all(a >= b for a, b in zip(vals, base)) and any(a > b for a, b in zip(vals, base)):
            return y
    return None


def is_pareto_efficient(x, inst, bound=PARETO_BOUND):
    """Exact verdict within ``bound`` assignments, otherwise a welfare-based certificate."""
    require_feasible(x, inst)
    if inst.has_identical_valuations:
        return Pareto.EFFICIENT
    if inst.n ** inst.m <= bound:
        return Pareto.DOMINATED if pareto_improvement(x, inst) is not None else Pareto.EFFICIENT
    if inst.all_matroids:
        from .optimize import max_weight_swm

        if social_welfare(x, inst) == social_welfare(max_weight_swm(inst), inst):
            return Pareto.EFFICIENT_SWM
    return Pareto.UNKNOWN


@dataclass(frozen=True)
class FairnessReport:
    values: tuple
    envy: tuple
    fef: bool
    fef1: bool
    weak_fef1: bool
    efx: bool
    ef1_ignoring_constraints: bool
    nash_welfare: object
    social_welfare: object
    pareto: Pareto = None
    fef1_witness: tuple = None

    def as_dict(self):
        from .io import format_value

        out = {
            "values": [format_value(v) for v in self.values],
            "positive_feasible_envy": [[format_value(v) for v in row] for row in self.envy],
            "f_ef": self.fef,
            "f_ef1": self.fef1,
            "weak_f_ef1": self.weak_fef1,
            "efx": self.efx,
            "ef1_ignoring_constraints": self.ef1_ignoring_constraints,
            "nash_welfare_product": format_value(self.nash_welfare),
            "social_welfare": format_value(self.social_welfare),
        }
        if self.fef1_witness is not None:
            out["f_ef1_witness"] = list(self.fef1_witness)
        if self.pareto is not None:
            out["pareto"] = self.pareto.value
        return out


def fairness_report(x, inst, pareto=False):
    require_feasible(x, inst)
    fef1 = is_fef1(x, inst)
    return FairnessReport(
        values=tuple(inst.value(i, x[i]) for i in inst.agents),
        envy=tuple(tuple(row) for row in positive_feasible_envy(x, inst)),
        fef=bool(is_fef(x, inst)),
        fef1=bool(fef1),
        weak_fef1=bool(is_weak_fef1(x, inst)),
        efx=bool(is_efx(x, inst)),
        ef1_ignoring_constraints=bool(is_ef1(x, inst)),
        nash_welfare=nash_welfare(x, inst),
        social_welfare=social_welfare(x, inst),
        pareto=is_pareto_efficient(x, inst) if pareto else None,
        fef1_witness=fef1.witness,
    )


def as_allocation(x):
    return x if isinstance(x, Allocation) else Allocation(x)

