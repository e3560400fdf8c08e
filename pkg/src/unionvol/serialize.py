"""Wire formats: object descriptions as JSON, workloads as JSON lines.

An operation line looks like
    {"op": "insert", "object": {"kind": "box", "lo": [...], "hi": [...]}}
    {"op": "delete", "object": {...}}
    {"op": "estimate"}              (optionally with "s" for suffix queries)
Deletes identify the object by its canonical description, which must match a
previously inserted line byte-for-byte after key ordering.
"""

import json

from .geometry import AxisBox, Ball, DiscretePointSet, HalfspacePolytope, Simplex


def object_to_json(obj):
    if isinstance(obj, AxisBox):
        return {"kind": "box", "lo": obj.lo.tolist(), "hi": obj.hi.tolist()}
    if isinstance(obj, Simplex):
        return {"kind": "simplex", "vertices": obj.vertices.tolist()}
    if isinstance(obj, Ball):
        return {"kind": "ball", "center": obj.center.tolist(), "r": obj.radius}
    if isinstance(obj, HalfspacePolytope):
        return {
            "kind": "polytope",
            "normals": obj.normals.tolist(),
            "offsets": obj.offsets.tolist(),
            "inner_center": obj.inner_center.tolist(),
            "r": obj.inner_radius,
            "R": obj.outer_bound,
        }
    if isinstance(obj, DiscretePointSet):
        return {"kind": "points", "points": obj.points.tolist()}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def object_from_json(doc):
    kind = doc.get("kind")
    if kind == "box":
        return AxisBox(doc["lo"], doc["hi"])
    if kind == "simplex":
        return Simplex(doc["vertices"])
    if kind == "ball":
        return Ball(doc["center"], doc["r"])
    if kind == "polytope":
        return HalfspacePolytope(doc["normals"], doc["offsets"],
                                 doc["inner_center"], doc["r"], doc["R"])
    if kind == "points":
        return DiscretePointSet(doc["points"])
    raise ValueError(f"unknown object kind: {kind!r}")


def canonical_key(doc):
    """Stable string identity for matching deletes to inserts."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def write_workload(path, ops):
    """ops: iterable of dicts with at least an "op" field."""
    with open(path, "w") as fh:
        for op in ops:
            fh.write(json.dumps(op, sort_keys=True) + "\n")


def read_workload(path):
    ops = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: bad JSON: {exc}") from None
            if doc.get("op") not in ("insert", "delete", "estimate"):
                raise ValueError(f"{path}:{lineno}: unknown op {doc.get('op')!r}")
            ops.append(doc)
    return ops
