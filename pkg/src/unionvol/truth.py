"""Ground-truth oracles the estimators are validated against.

These are deliberately independent of the estimator code paths: exact box
unions by coordinate compression, exact polygon unions via shapely, full
grid scans, and size-weighted Monte Carlo with a reported standard error
for everything else.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import total_size

# Coordinate compression materialises a cell grid; refuse anything that
# would not fit comfortably in memory.
_MAX_CELLS = 200_000_000


@dataclass
class McEstimate:
    value: float
    stderr: float
    samples: int


def exact_box_union(boxes):
    """Exact volume of a union of axis boxes, d <= 3.

    Coordinate compression: the union is a set of grid cells, each fully
    covered or fully disjoint.  Exact up to float summation when the box
    coordinates are exact floats.
    """
    if not boxes:
        return 0.0
    d = boxes[0].dim
    if d > 3:
        raise ValueError("exact_box_union supports d <= 3 only")
    if any(b.dim != d for b in boxes):
        raise ValueError("mixed dimensions")
    los = np.array([b.lo for b in boxes])
    his = np.array([b.hi for b in boxes])
    cuts = [np.unique(np.concatenate([los[:, i], his[:, i]])) for i in range(d)]
    shape = tuple(len(c) - 1 for c in cuts)
    if math.prod(shape) > _MAX_CELLS:
        raise ValueError("compressed grid too large; reduce the instance")
    covered = np.zeros(shape, dtype=bool)
    for b in range(len(boxes)):
        idx = tuple(
            slice(np.searchsorted(cuts[i], los[b, i]),
                  np.searchsorted(cuts[i], his[b, i]))
            for i in range(d))
        covered[idx] = True
    lengths = [np.diff(c) for c in cuts]
    cell_vol = lengths[0]
    for i in range(1, d):
        cell_vol = np.multiply.outer(cell_vol, lengths[i])
    return float(np.sum(cell_vol[covered]))


def exact_poly_union_2d(objects):
    """Exact area of a union of 2-d boxes and simplices via polygon geometry.

    Routed through shapely, which shares no code with the estimators; used
    as ground truth for mixed box/triangle workloads.
    """
    from shapely.geometry import Polygon, box as shp_box
    from shapely.ops import unary_union

    from .geometry import AxisBox, Simplex

    polys = []
    for obj in objects:
        if isinstance(obj, AxisBox):
            if obj.dim != 2:
                raise ValueError("exact_poly_union_2d is 2-d only")
            polys.append(shp_box(obj.lo[0], obj.lo[1], obj.hi[0], obj.hi[1]))
        elif isinstance(obj, Simplex):
            if obj.dim != 2:
                raise ValueError("exact_poly_union_2d is 2-d only")
            polys.append(Polygon(obj.vertices.tolist()))
        else:
            raise TypeError(f"unsupported object for polygon union: {type(obj).__name__}")
    if not polys:
        return 0.0
    return float(unary_union(polys).area)


def mc_union_volume(objects, samples, rng):
    """Monte Carlo union volume with standard error.

    Draw an object proportionally to its size, a uniform point inside it,
    and average T / coverage(point) where T is the total size.  Unbiased for
    any overlap pattern; the stderr lets callers fold the uncertainty into
    their tolerance.
    """
    if not objects:
        return McEstimate(0.0, 0.0, samples)
    sizes = np.array([obj.size() for obj in objects])
    t = float(sizes.sum())
    pick = rng.choice(len(objects), size=samples, p=sizes / t)
    values = np.empty(samples)
    for i, obj in enumerate(objects):
        mask = pick == i
        count = int(mask.sum())
        if count == 0:
            continue
        pts = obj.sample_many(count, rng)
        cov = np.zeros(count, dtype=np.int64)
        for other in objects:
            cov += other.contains_many(pts)
        values[mask] = t / cov
    value = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return McEstimate(value, stderr, samples)


def exact_grid_count(objects, delta, d):
    """Number of integer grid points of {1..delta}^d covered by the union.

    Full scan; refuses grids past 10^8 points.  Membership goes through the
    objects' vectorised containment.
    """
    if delta ** d > 100_000_000:
        raise ValueError("grid too large for a full scan")
    axes = [np.arange(1, delta + 1, dtype=float)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    covered = np.zeros(len(pts), dtype=bool)
    for obj in objects:
        covered |= obj.contains_many(pts)
    return int(covered.sum())


def union_truth(objects, rng=None, mc_samples=200_000):
    """Best available truth: exact where possible, else Monte Carlo.

    Returns (value, stderr); stderr is 0.0 on the exact paths.
    """
    from .geometry import AxisBox, Simplex

    if not objects:
        return 0.0, 0.0
    if all(isinstance(o, AxisBox) for o in objects) and objects[0].dim <= 3:
        return exact_box_union(objects), 0.0
    if all(isinstance(o, (AxisBox, Simplex)) for o in objects) and objects[0].dim == 2:
        return exact_poly_union_2d(objects), 0.0
    if rng is None:
        raise ValueError("no exact oracle for these objects; pass an rng for Monte Carlo")
    est = mc_union_volume(objects, mc_samples, rng)
    return est.value, est.stderr
