"""Seeded random instances for property tests and benchmarks.

Every generator takes a :class:`random.Random` and returns an instance that
admits a complete feasible allocation.
"""

import random

from .matroid import LaminarMatroid, PartitionMatroid, TransversalMatroid, UniformMatroid
from .model import Instance
from .optimize import max_cardinality_bundles


def _rng(seed_or_rng):
    return seed_or_rng if isinstance(seed_or_rng, random.Random) else random.Random(seed_or_rng)


def _values(rng, n, m, max_value, binary, identical):
    top = 1 if binary else max_value
    first = [rng.randint(0, top) for _ in range(m)]
    if identical:
        return [list(first) for _ in range(n)]
    return [first] + [[rng.randint(0, top) for _ in range(m)] for _ in range(n - 1)]


def _category_sizes(rng, m, n_categories):
    cuts = sorted(rng.sample(range(1, m), n_categories - 1)) if n_categories > 1 else []
    bounds = [0] + cuts + [m]
    return [bounds[k + 1] - bounds[k] for k in range(n_categories)]


def _capacities(rng, n, size, identical):
    """Per-agent capacities for one category whose sum covers ``size``."""
    if identical:
        k = rng.randint(-(-size // n), size) if size else rng.randint(0, 1)
        return [k] * n
    while True:
        caps = [rng.randint(0, size) for _ in range(n)]
        if sum(caps) >= size:
            return caps


def random_partition_instance(
    rng,
    n=2,
    m=6,
    n_categories=2,
    max_value=3,
    binary=False,
    identical_valuations=False,
    identical_capacities=False,
):
    """Shared categories, per-agent capacities, values in ``0..max_value``."""
    rng = _rng(rng)
    n_categories = max(1, min(n_categories, m))
    sizes = _category_sizes(rng, m, n_categories)
    categories, start = [], 0
    for s in sizes:
        categories.append(range(start, start + s))
        start += s
    per_cat = [_capacities(rng, n, s, identical_capacities) for s in sizes]
    constraints = [PartitionMatroid(categories, [per_cat[h][i] for h in range(n_categories)]) for i in range(n)]
    rows = _values(rng, n, m, max_value, binary, identical_valuations)
    return Instance(rows, constraints)


def random_bo_matroid(rng, m, kind, n=2):
    """A base-orderable matroid on ``m`` items with enough rank for ``n`` agents."""
    rng = _rng(rng)
    if kind == "uniform":
        return UniformMatroid(range(m), rng.randint(-(-m // n), m))
    if kind == "partition":
        sizes = _category_sizes(rng, m, rng.randint(1, min(3, m)))
        cats, start, caps = [], 0, []
        for s in sizes:
            cats.append(range(start, start + s))
            caps.append(rng.randint(-(-s // n), s))
            start += s
        return PartitionMatroid(cats, caps)
    if kind == "laminar":
        half = m // 2
        left, right = range(0, half), range(half, m)
        sets = [range(m), left, right]
        caps = [
            rng.randint(-(-m // n), m),
            rng.randint(-(-len(left) // n), len(left)),
            rng.randint(-(-len(right) // n), len(right)),
        ]
        return LaminarMatroid(sets, caps)
    if kind == "transversal":
        r = rng.randint(-(-m // n), m)
        adjacency = {g: rng.sample(range(r), rng.randint(1, r)) for g in range(m)}
        return TransversalMatroid(adjacency)
    raise ValueError(f"unknown matroid kind {kind!r}")


BO_KINDS = ("uniform", "partition", "laminar", "transversal")


def random_bo_instance(rng, n=3, m=6, kind=None, max_value=3, binary=False, identical_valuations=False):
    """Identical base-orderable matroid for all agents; resampled until a complete allocation exists."""
    rng = _rng(rng)
    while True:
        k = kind or rng.choice(BO_KINDS)
        matroid = random_bo_matroid(rng, m, k, n)
        rows = _values(rng, n, m, max_value, binary, identical_valuations)
        inst = Instance(rows, matroid)
        if sum(len(b) for b in max_cardinality_bundles(inst)) == m:
            return inst


def random_bipartite(rng, n_left, n_right, p=0.4):
    rng = _rng(rng)
    return {u: [v for v in range(n_right) if rng.random() < p] for u in range(n_left)}


#: Benchmark/property settings: name -> (algorithm, generator keyword arguments).
SETTINGS = {
    "crr": ("crr", dict(kind="partition", n_range=(1, 4), m_range=(1, 8), n_categories=1)),
    "back_and_forth_crr": ("back_and_forth_crr", dict(kind="partition", n_range=(1, 4), m_range=(1, 9), n_categories=2)),
    "per_category_crr": (
        "per_category_crr",
        dict(kind="partition", n_range=(1, 4), m_range=(1, 9), n_categories=3, identical_valuations=True),
    ),
    "iterated_priority_matching": (
        "iterated_priority_matching",
        dict(kind="partition", n_range=(1, 4), m_range=(1, 9), n_categories=3, binary=True),
    ),
    "rr_squared": ("rr_squared", dict(kind="partition", n_range=(2, 2), m_range=(1, 9), n_categories=4)),
    "iterated_swaps": ("iterated_swaps", dict(kind="bo", n_range=(3, 3), m_range=(1, 9), binary=True)),
    "cut_and_choose_two_agents": ("cut_and_choose_two_agents", dict(kind="bo", n_range=(2, 2), m_range=(1, 10))),
}


def setting_instance(name, rng):
    """One random instance satisfying the precondition of setting ``name``."""
    rng = _rng(rng)
    _, params = SETTINGS[name]
    params = dict(params)
    kind = params.pop("kind")
    n = rng.randint(*params.pop("n_range"))
    m = rng.randint(*params.pop("m_range"))
    if kind == "partition":
        return random_partition_instance(rng, n=n, m=m, **params)
    return random_bo_instance(rng, n=n, m=m, **params)
