"""Bipartite matching by augmenting paths.

Graphs are adjacency mappings ``left vertex -> iterable of right vertices``.
Matchings are returned as dicts ``left -> right``. All searches visit
vertices in ascending order so results are reproducible.
"""

from .errors import InputError


def _normalize(adjacency):
    return {u: sorted(set(vs)) for u, vs in adjacency.items()}


def _try_augment(u, adj, match_right, seen):
    for v in adj[u]:
        if v in seen:
            continue
        seen.add(v)
        owner = match_right.get(v)
        if owner is None or _try_augment(owner, adj, match_right, seen):
            match_right[v] = u
            return True
    return False


def _as_left_map(match_right):
    return {u: v for v, u in sorted(match_right.items(), key=lambda kv: kv[1])}


def max_matching(adjacency):
    """Maximum-cardinality matching (Kuhn's augmenting-path algorithm).

    >>> max_matching({0: ["a", "b"], 1: ["a"]})
    {0: 'b', 1: 'a'}
    """
    adj = _normalize(adjacency)
    match_right = {}
    for u in sorted(adj):
        _try_augment(u, adj, match_right, set())
    return _as_left_map(match_right)


def priority_matching(adjacency, sigma):
    """Matching whose saturation vector along ``sigma`` is lexicographically maximal.

    Left vertices are processed in priority order; each one is matched if an
    augmenting path starting at it exists. Augmenting never unmatches an
    already matched left vertex, so earlier vertices keep their status.
    The result is also a maximum-cardinality matching.
    """
    adj = _normalize(adjacency)
    sigma = list(sigma)
    if len(set(sigma)) != len(sigma) or set(sigma) != set(adj):
        raise InputError("priority order must be a permutation of the left vertices")
    match_right = {}
    for u in sigma:
        _try_augment(u, adj, match_right, set())
    result = _as_left_map(match_right)
    assert len(result) == len(max_matching(adj)), "priority matching is not maximum"
    return result


def saturation_vector(matching, sigma):
    """0/1 tuple marking which vertices of ``sigma`` are matched."""
    return tuple(1 if u in matching else 0 for u in sigma)


def is_matching(adjacency, matching):
    """True iff ``matching`` uses only graph edges and no right vertex twice."""
    rights = list(matching.values())
    if len(set(rights)) != len(rights):
        return False
    return all(u in adjacency and v in adjacency[u] for u, v in matching.items())
