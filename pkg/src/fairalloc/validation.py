"""Input validation for the estimator-style API."""

import numpy as np

from .constraints import SetSystem
from .errors import InputError
from .matroid import Matroid, UniformMatroid
from .model import Allocation, Instance, exact


def check_valuations(X):
    """Non-negative ``n x m`` valuations as rows of exact numbers.

    Accepts nested lists or arrays; floats are converted exactly.
    """
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise InputError(f"valuations must be 2-dimensional, got shape {X.shape}")
        X = X.tolist()
    if not isinstance(X, (list, tuple)) or not X:
        raise InputError("valuations must be a non-empty n x m table")
    rows = [list(r) if isinstance(r, (list, tuple, np.ndarray)) else None for r in X]
    if any(r is None for r in rows):
        raise InputError("valuations must be a table of rows")
    m = len(rows[0])
    if any(len(r) != m for r in rows):
        raise InputError("valuation rows differ in length")
    return [[exact(v) for v in r] for r in rows]


def check_constraints(constraints, n, m):
    """One constraint per agent; ``None`` means unconstrained (uniform matroid of rank m)."""
    if constraints is None:
        return [UniformMatroid(range(m), m)] * n
    if isinstance(constraints, (Matroid, SetSystem)):
        return [constraints] * n
    constraints = list(constraints)
    if len(constraints) != n:
        raise InputError(f"expected {n} constraints, got {len(constraints)}")
    return constraints


def check_instance(X, constraints=None):
    if isinstance(X, Instance):
        if constraints is not None:
            raise InputError("pass constraints either inside the Instance or to the estimator, not both")
        return X
    rows = check_valuations(X)
    return Instance(rows, check_constraints(constraints, len(rows), len(rows[0])))


def check_order(order, n):
    if order is None:
        return None
    order = [int(a) for a in order]
    if sorted(order) != list(range(n)):
        raise InputError(f"order {order} is not a permutation of 0..{n - 1}")
    return order


def check_allocation(x, n, m=None):
    """An :class:`Allocation` from bundles or from an owner-per-item label vector."""
    if isinstance(x, Allocation):
        out = x
    elif isinstance(x, np.ndarray) and x.ndim == 1 or (
        isinstance(x, (list, tuple)) and x and all(isinstance(v, (int, np.integer)) for v in x)
    ):
        labels = [int(v) for v in x]
        if any(not -1 <= v < n for v in labels):
            raise InputError("labels must be agent ids or -1")
        out = Allocation.from_owners(labels, n)
    else:
        out = Allocation(x)
    if len(out) != n:
        raise InputError(f"expected {n} bundles, got {len(out)}")
    if m is not None and any(g < 0 or g >= m for b in out for g in b):
        raise InputError(f"bundles reference items outside 0..{m - 1}")
    return out
