"""JSON instance and allocation files.

Instance file::

    {
      "schema": 1,
      "name": "example",
      "agents": ["Alice", "Bob"],          # or a count
      "items": 4,                          # or a list of names
      "valuations": [[1, 1, 0, 0], [1, "1/2", 0, 0]],
      "categories": [[0, 1], [2, 3]],      # partition shorthand ...
      "capacities": [[1, 1], [2, 1]]       # ... one row per agent, or one shared row
    }

Instead of ``categories``/``capacities`` a file may give ``"constraints"``:
either ``{"shared": SPEC}`` or a list with one ``SPEC`` per agent. A spec is
an object with a ``"kind"`` key; see :func:`constraint_from_spec`.

Allocation file: ``{"bundles": [[0, 2], [1, 3]]}``.
"""

import json
from fractions import Fraction

from .constraints import (
    BipartiteMatchingConstraint,
    BudgetConstraint,
    ConflictGraphConstraint,
    MatroidIntersection,
)
from .errors import InputError
from .matroid import (
    FreeExtension,
    GraphicMatroid,
    LaminarMatroid,
    PartitionMatroid,
    TransversalMatroid,
    UniformMatroid,
)
from .model import Allocation, Instance, exact

SCHEMA = 1


def format_value(v):
    """Exact value as a JSON scalar: ints stay ints, fractions become ``"p/q"``."""
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def _field(obj, key, where, required=True):
    if key not in obj:
        if required:
            raise InputError(f"{where}: missing field {key!r}")
        return None
    return obj[key]


def _ids(obj, where):
    if not isinstance(obj, list) or not all(isinstance(g, int) and not isinstance(g, bool) for g in obj):
        raise InputError(f"{where}: expected a list of integer ids")
    return obj


def constraint_from_spec(spec, m, where="constraint"):
    """Build a constraint from its JSON spec over items ``0..m-1``.

    Kinds: ``uniform`` (capacity), ``partition`` (categories, capacities),
    ``laminar`` (sets, capacities), ``transversal`` (adjacency: list of
    right-vertex lists, one per item), ``graphic`` (vertices, edges; item
    ``e`` is edge ``e``), ``free_extension`` (base, dummies: how many of the
    last items are dummies), ``budget`` (costs, budget), ``conflict``
    (edges), ``intersection`` (first, second), ``matching`` (edges).
    """
    if not isinstance(spec, dict):
        raise InputError(f"{where}: expected an object")
    kind = _field(spec, "kind", where)
    f = lambda key: _field(spec, key, f"{where} ({kind})")  # noqa: E731
    if kind == "uniform":
        return UniformMatroid(range(m), f("capacity"))
    if kind == "partition":
        return PartitionMatroid([_ids(c, where) for c in f("categories")], f("capacities"))
    if kind == "laminar":
        return LaminarMatroid([_ids(c, where) for c in f("sets")], f("capacities"))
    if kind == "transversal":
        adj = f("adjacency")
        if len(adj) != m:
            raise InputError(f"{where}: adjacency needs one entry per item")
        return TransversalMatroid({g: vs for g, vs in enumerate(adj)})
    if kind == "graphic":
        edges = f("edges")
        if len(edges) != m:
            raise InputError(f"{where}: graphic constraints need one edge per item")
        return GraphicMatroid(f("vertices"), edges)
    if kind == "free_extension":
        k = f("dummies")
        base = constraint_from_spec(f("base"), m - k, where + ".base")
        return FreeExtension(base, range(m - k, m))
    if kind == "budget":
        return BudgetConstraint([exact(c) for c in f("costs")], exact(f("budget")))
    if kind == "conflict":
        return ConflictGraphConstraint(range(m), f("edges"))
    if kind == "intersection":
        return MatroidIntersection(
            constraint_from_spec(f("first"), m, where + ".first"),
            constraint_from_spec(f("second"), m, where + ".second"),
        )
    if kind == "matching":
        return BipartiteMatchingConstraint(f("edges"))
    raise InputError(f"{where}: unknown constraint kind {kind!r}")


def constraint_to_spec(c):
    if isinstance(c, UniformMatroid):
        return {"kind": "uniform", "capacity": c.capacity}
    if isinstance(c, PartitionMatroid):
        return {
            "kind": "partition",
            "categories": [sorted(cat) for cat in c.categories],
            "capacities": list(c.capacities),
        }
    if isinstance(c, LaminarMatroid):
        return {"kind": "laminar", "sets": [sorted(s) for s in c.sets], "capacities": list(c.capacities)}
    if isinstance(c, TransversalMatroid):
        return {"kind": "transversal", "adjacency": [sorted(c.adjacency[g]) for g in c.ground_set]}
    if isinstance(c, GraphicMatroid):
        return {"kind": "graphic", "vertices": c.n_vertices, "edges": [list(e) for e in c.edges]}
    if isinstance(c, FreeExtension):
        return {"kind": "free_extension", "dummies": len(c.new_items), "base": constraint_to_spec(c.base)}
    if isinstance(c, BudgetConstraint):
        return {
            "kind": "budget",
            "costs": [format_value(c.costs[g]) for g in c.ground_set],
            "budget": format_value(c.budget),
        }
    if isinstance(c, ConflictGraphConstraint):
        return {"kind": "conflict", "edges": [list(e) for e in c.edges]}
    if isinstance(c, MatroidIntersection):
        return {
            "kind": "intersection",
            "first": constraint_to_spec(c.first),
            "second": constraint_to_spec(c.second),
        }
    if isinstance(c, BipartiteMatchingConstraint):
        return {"kind": "matching", "edges": [list(e) for e in c.edges]}
    raise InputError(f"constraint {c!r} has no file representation")


def _names(value, where):
    if isinstance(value, int) and not isinstance(value, bool):
        if value < 0:
            raise InputError(f"{where}: count must be non-negative")
        return value, None
    if isinstance(value, list) and all(isinstance(s, str) for s in value):
        return len(value), value
    raise InputError(f"{where}: expected a count or a list of names")


def instance_from_dict(d):
    if not isinstance(d, dict):
        raise InputError("instance: expected a JSON object")
    schema = d.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise InputError(f"instance: unsupported schema {schema!r}")
    n, agent_names = _names(_field(d, "agents", "instance"), "agents")
    m, item_names = _names(_field(d, "items", "instance"), "items")
    rows = _field(d, "valuations", "instance")
    if not isinstance(rows, list) or len(rows) != n:
        raise InputError(f"valuations: expected {n} rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != m:
            raise InputError(f"valuations[{i}]: expected {m} entries")
    if "constraints" in d:
        spec = d["constraints"]
        if isinstance(spec, dict) and "shared" in spec:
            constraints = constraint_from_spec(spec["shared"], m, "constraints.shared")
        elif isinstance(spec, list):
            if len(spec) != n:
                raise InputError(f"constraints: expected {n} entries")
            constraints = [constraint_from_spec(s, m, f"constraints[{i}]") for i, s in enumerate(spec)]
        else:
            raise InputError('constraints: expected {"shared": ...} or a per-agent list')
    else:
        categories = [_ids(c, "categories") for c in _field(d, "categories", "instance")]
        caps = _field(d, "capacities", "instance")
        if caps and not isinstance(caps[0], list):
            caps = [caps] * n
        if len(caps) != n:
            raise InputError(f"capacities: expected one row or {n} rows")
        for i, row in enumerate(caps):
            if not isinstance(row, list) or len(row) != len(categories):
                raise InputError(f"capacities[{i}]: expected one entry per category ({len(categories)})")
        constraints = [PartitionMatroid(categories, row) for row in caps]
    try:
        return Instance(
            rows, constraints, agent_names=agent_names, item_names=item_names, name=d.get("name")
        )
    except InputError as e:
        raise InputError(f"instance: {e}") from None


def instance_to_dict(inst):
    d = {"schema": SCHEMA}
    if inst.name is not None:
        d["name"] = inst.name
    d["agents"] = list(inst.agent_names) if inst.agent_names is not None else inst.n
    d["items"] = list(inst.item_names) if inst.item_names is not None else inst.m
    d["valuations"] = [[format_value(v) for v in row] for row in inst.valuations]
    if inst.has_identical_categories and not any(isinstance(c, UniformMatroid) for c in inst.constraints):
        categories, caps = inst.partition_structure()
        d["categories"] = [sorted(c) for c in categories]
        d["capacities"] = [list(row) for row in caps]
    elif inst.has_identical_constraints:
        d["constraints"] = {"shared": constraint_to_spec(inst.constraints[0])}
    else:
        d["constraints"] = [constraint_to_spec(c) for c in inst.constraints]
    return d


def _load_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{what}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None


def loads_instance(text):
    return instance_from_dict(_load_json(text, "instance"))


def dumps_instance(inst):
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def read_instance(path):
    with open(path) as f:
        return loads_instance(f.read())


def write_instance(inst, path):
    with open(path, "w") as f:
        f.write(dumps_instance(inst))


def allocation_from_dict(d):
    bundles = _field(d, "bundles", "allocation") if isinstance(d, dict) else d
    if not isinstance(bundles, list):
        raise InputError("allocation: expected a list of bundles")
    return Allocation(_ids(b, f"bundles[{k}]") for k, b in enumerate(bundles))


def allocation_to_dict(x):
    return {"bundles": x.to_lists()}


def loads_allocation(text):
    return allocation_from_dict(_load_json(text, "allocation"))


def dumps_allocation(x):
    return json.dumps(allocation_to_dict(x)) + "\n"


def read_allocation(path):
    with open(path) as f:
        return loads_allocation(f.read())


def write_allocation(x, path):
    with open(path, "w") as f:
        f.write(dumps_allocation(x))
