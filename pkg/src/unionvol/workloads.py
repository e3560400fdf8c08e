"""Workload generators for the benchmark harness.

A workload is a list of (kind, obj) pairs with kind in {"insert", "delete",
"estimate"}; obj is None for estimates.  Generators take an explicit rng and
a volume window so streams can be sized to whatever admissibility range the
estimator under test enforces.

Volumes are drawn log-uniformly inside the window and shapes are placed in a
cubical domain a few object diameters wide, which keeps unions overlapping
enough to be interesting without degenerating to either disjointness or one
object swallowing the rest.
"""

import math

import numpy as np

from .geometry import AxisBox, Ball, Simplex

_DOMAIN_DIAMETERS = 3.0


def _log_uniform(rng, lo, hi):
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def random_box(rng, d, vol_lo, vol_hi, center=None):
    """Axis box with volume log-uniform in [vol_lo, vol_hi] and mild aspect
    skew, centered inside the standard domain for that scale."""
    vol = _log_uniform(rng, vol_lo, vol_hi)
    side = vol ** (1.0 / d)
    skew = rng.uniform(-0.5, 0.5, size=d)
    skew -= skew.mean()
    extents = side * np.exp(skew)
    if center is None:
        center = rng.uniform(0.0, _DOMAIN_DIAMETERS * side, size=d)
    return AxisBox(center - extents / 2.0, center + extents / 2.0)


def random_triangle(rng, vol_lo, vol_hi, center=None):
    """2-d simplex with area log-uniform in [vol_lo, vol_hi]."""
    area = _log_uniform(rng, vol_lo, vol_hi)
    scale = math.sqrt(area)
    while True:
        verts = rng.uniform(-1.0, 1.0, size=(3, 2))
        base = abs(np.linalg.det(verts[1:] - verts[0])) / 2.0
        if base > 0.05:  # reject slivers; keeps conditioning sane
            break
    verts = verts * math.sqrt(area / base)
    if center is None:
        center = rng.uniform(0.0, _DOMAIN_DIAMETERS * scale, size=2)
    return Simplex(verts - verts.mean(axis=0) + center)


def random_ball(rng, d, vol_lo, vol_hi, center=None):
    vol = _log_uniform(rng, vol_lo, vol_hi)
    unit = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
    radius = (vol / unit) ** (1.0 / d)
    if center is None:
        center = rng.uniform(0.0, _DOMAIN_DIAMETERS * radius, size=d)
    return Ball(center, radius)


def random_objects(rng, count, d, vol_lo, vol_hi, kinds=("box",)):
    """Mixed object list; kinds drawn uniformly from the given menu."""
    makers = {
        "box": lambda: random_box(rng, d, vol_lo, vol_hi),
        "triangle": lambda: random_triangle(rng, vol_lo, vol_hi),
        "ball": lambda: random_ball(rng, d, vol_lo, vol_hi),
    }
    for kind in kinds:
        if kind not in makers:
            raise ValueError(f"unknown object kind {kind!r}")
        if kind == "triangle" and d != 2:
            raise ValueError("triangles are 2-d only")
    picks = rng.integers(0, len(kinds), size=count)
    return [makers[kinds[i]]() for i in picks]


# ---------------------------------------------------------------------------
# op-sequence builders


def mixed_dynamic(rng, objects, n_ops, p_insert=0.45, p_delete=0.25):
    """Random insert/delete/estimate stream over a pool of objects.

    Deletes target a uniformly random live object; when nothing is live (or
    the pool is exhausted) the op falls back to an estimate.  The remaining
    probability mass goes to estimates.
    """
    ops = []
    live = []
    pool = list(objects)
    for _ in range(n_ops):
        u = rng.uniform()
        if u < p_insert and pool:
            obj = pool.pop()
            live.append(obj)
            ops.append(("insert", obj))
        elif u < p_insert + p_delete and live:
            obj = live.pop(int(rng.integers(len(live))))
            ops.append(("delete", obj))
        else:
            ops.append(("estimate", None))
    return ops


def insert_all_delete_all(objects, estimate_every=1):
    """Insert the whole pool, then delete it in reverse, estimating along
    the way; ends on an estimate of the empty multiset."""
    ops = []
    for i, obj in enumerate(objects):
        ops.append(("insert", obj))
        if (i + 1) % estimate_every == 0:
            ops.append(("estimate", None))
    for i, obj in enumerate(reversed(objects)):
        ops.append(("delete", obj))
        if (i + 1) % estimate_every == 0:
            ops.append(("estimate", None))
    return ops


def sliding_window(objects, window):
    """Insertion-only stream with suffix queries covering the last `window`
    insertions: at each time t >= window, query s = t - window + 1."""
    ops = []
    for t, obj in enumerate(objects, start=1):
        ops.append(("insert", obj))
        if t >= window:
            ops.append(("suffix", t - window + 1))
    return ops


def volume_ramp(rng, count, d, vol_lo, ratio, kinds=("box",)):
    """Objects whose volumes sweep [vol_lo, vol_lo * ratio] geometrically,
    shuffled so neighbouring scales interleave in the stream."""
    vols = np.geomspace(vol_lo, vol_lo * ratio, num=count)
    objs = []
    for v in vols:
        objs.extend(random_objects(rng, 1, d, v, v * 1.0000001, kinds=kinds))
    perm = rng.permutation(count)
    return [objs[i] for i in perm]
