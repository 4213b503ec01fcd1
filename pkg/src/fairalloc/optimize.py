"""Matching and matroid-intersection engines.

``max_weight_swm`` casts welfare maximization as weighted matroid
intersection over agent-item pairs: the first matroid is the direct sum of
the agents' constraints, the second lets each item go to at most one agent.
Each pair ``(i, g)`` weighs ``V + v_i(g)`` with ``V = m * max value``, so
the heaviest common independent set first allocates as many items as
possible and then maximizes total value.
"""

from .errors import CapabilityError, InputError
from .matching import max_matching, priority_matching, saturation_vector  # noqa: F401
from .matroid import Matroid
from .model import Allocation


def agent_item_graph(inst, category_items, bundles, capacity_left):
    """Agents with spare capacity, each adjacent to the unallocated items it values at 1.

    ``capacity_left[i]`` is agent ``i``'s remaining capacity in the category.
    """
    allocated = set().union(*bundles) if bundles else set()
    free = [g for g in sorted(category_items) if g not in allocated]
    return {
        i: [g for g in free if inst.valuations[i][g] == 1]
        for i in inst.agents
        if capacity_left[i] > 0
    }


def _intersection_weight(inst):
    top = inst.max_value()
    big = inst.m * top if top > 0 else 1
    return lambda i, g: big + inst.valuations[i][g]


def _require_matroids(inst):
    if not inst.all_matroids:
        raise CapabilityError("welfare maximization needs matroid constraints for every agent")


def _weighted_intersection(inst, weight):
    """Max-weight common independent set by shortest augmenting paths.

    Returns per-agent bundles. Each augmentation takes a source-to-sink path
    in the exchange graph of minimum length (vertex lengths ``-w`` outside
    the current set, ``+w`` inside), fewest arcs among those.
    """
    n, m = inst.n, inst.m
    pairs = [(i, g) for i in range(n) for g in range(m)]
    w = [weight(i, g) for i, g in pairs]
    indep = [c._independent for c in inst.constraints]
    bundles = [set() for _ in range(n)]
    owner = {}

    while True:
        inside = [k for k, (i, g) in enumerate(pairs) if owner.get(g) == i]
        outside = [k for k, (i, g) in enumerate(pairs) if owner.get(g) != i]
        can_add = {}
        for k in outside:
            i, g = pairs[k]
            can_add[k] = indep[i](frozenset(bundles[i] | {g}))
        sources = [k for k in outside if can_add[k]]
        sinks = {k for k in outside if pairs[k][1] not in owner}
        if not sources:
            break

        arcs = {k: [] for k in range(len(pairs))}
        for y in inside:
            a, h = pairs[y]
            for x in outside:
                i, g = pairs[x]
                # first matroid: I - y + x
                if i == a:
                    ok1 = indep[i](frozenset((bundles[i] - {h}) | {g}))
                else:
                    ok1 = can_add[x]
                if ok1:
                    arcs[y].append(x)
                # second matroid: item g free, or freed by removing y
                if g not in owner or g == h:
                    arcs[x].append(y)

        length = [(-w[k] if k in can_add else w[k]) for k in range(len(pairs))]
        dist = {k: (length[k], 0) for k in sources}
        parent = {k: None for k in sources}
        for _ in range(len(pairs)):
            changed = False
            for u in sorted(dist):
                du = dist[u]
                for v in arcs[u]:
                    cand = (du[0] + length[v], du[1] + 1)
                    if v not in dist or cand < dist[v]:
                        dist[v] = cand
                        parent[v] = u
                        changed = True
            if not changed:
                break
        reachable = [k for k in sinks if k in dist]
        if not reachable:
            break
        end = min(reachable, key=lambda k: (dist[k], k))
        path = []
        k = end
        while k is not None:
            path.append(k)
            k = parent[k]
        for k in path:
            i, g = pairs[k]
            if owner.get(g) == i:
                del owner[g]
                bundles[i].discard(g)
        for k in path:
            i, g = pairs[k]
            if k in can_add:
                owner[g] = i
                bundles[i].add(g)
        assert all(indep[i](frozenset(bundles[i])) for i in range(n))
    return bundles


def max_cardinality_bundles(inst):
    """Bundles allocating as many items as possible under the agents' matroids."""
    _require_matroids(inst)
    return _weighted_intersection(inst, lambda i, g: 1)


def max_weight_swm(inst):
    """Complete feasible allocation maximizing the sum of utilities."""
    _require_matroids(inst)
    bundles = _weighted_intersection(inst, _intersection_weight(inst))
    x = Allocation(bundles)
    if sum(len(b) for b in bundles) != inst.m:
        raise InputError("no complete feasible allocation exists")
    return x


def is_matroid(c):
    return isinstance(c, Matroid)
