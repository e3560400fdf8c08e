"""Enumeration of hash-selected grid points inside a rotated box.

Given hash params and a level l, the filter returns every grid point of
[1..delta]^d that (a) satisfies the box's halfspace system and (b) hashes at
or below the level-l threshold.  Halfspace membership is decided in exact
rational arithmetic (float halfspaces convert to Fractions losslessly), so
all three routes agree point-for-point:

* "ilp"  - integer program over (x, y, z) with the congruence
           a + b*key(x) = p*y + z, 0 <= z <= threshold, enumerated
           lexicographically.  The reference route.
* "scan" - vectorised sweep of the box's grid window: float halfspace
           evaluation decides all points farther than a rigorous error pad
           from a boundary, and the handful inside the pad fall back to
           Fractions.  The fast route; exact by the same predicates.
* brute_select - plain-Python full scan, for tests.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from .hashing import HashParams
from .intlinprog import as_fraction, ilp_list

_METHODS = ("scan", "ilp")


class GridFilter:
    def __init__(self, params: HashParams, method: str = "scan"):
        if method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}")
        self.params = params
        self.method = method

    def select(self, box, level):
        """Selected grid points inside box at the given level, as a (k, d)
        int64 array in lexicographic order."""
        if not (0 <= level <= self.params.max_level()):
            raise ValueError(f"level {level} outside 0..{self.params.max_level()}")
        bounds = _grid_bounds(box, self.params.delta)
        if bounds is None:
            return _empty(self.params.d)
        if self.method == "ilp":
            pts = self._select_ilp(box, level, bounds)
            return _canonical(pts, self.params.d)
        return self._select_scan(box, level, bounds)

    # -- integer-programming route

    def _select_ilp(self, box, level, bounds):
        params = self.params
        d = params.d
        lo, hi = bounds
        thr = params.select_threshold(level)
        normals, offsets = box.halfspaces()
        a_ub = [[as_fraction(v) for v in row] + [Fraction(0), Fraction(0)]
                for row in normals]
        b_ub = [as_fraction(v) for v in offsets]

        weights = params.key_weights
        eq = [Fraction(params.b * w) for w in weights]
        eq += [Fraction(-params.p), Fraction(-1)]
        b_eq = [Fraction(-params.a)]

        key_lo = sum(w * l for w, l in zip(weights, lo))
        key_hi = sum(w * h for w, h in zip(weights, hi))
        y_lo = (params.a + params.b * key_lo - thr) // params.p
        y_hi = (params.a + params.b * key_hi) // params.p

        full_lo = list(lo) + [y_lo, 0]
        full_hi = list(hi) + [y_hi, thr]
        sols = ilp_list(a_ub, b_ub, [eq], b_eq, full_lo, full_hi)
        return [s[:d] for s in sols]

    # -- vectorised scan route

    def _select_scan(self, box, level, bounds):
        params = self.params
        d = params.d
        lo, hi = bounds
        thr = params.select_threshold(level)
        normals, offsets = box.halfspaces()

        axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=1)

        keep = np.ones(len(pts), dtype=bool)
        unsure = np.zeros(len(pts), dtype=bool)
        coord_mag = float(max(abs(l) for l in lo) + max(abs(h) for h in hi))
        fpts = pts.astype(float)
        for row, off in zip(normals, offsets):
            slack = off - fpts @ row
            pad = 1e-10 * (1.0 + abs(off) + float(np.abs(row).sum()) * coord_mag)
            keep &= slack >= -pad
            unsure |= np.abs(slack) <= pad
        unsure &= keep
        if unsure.any():
            rows = [[as_fraction(v) for v in row] for row in normals]
            offs = [as_fraction(v) for v in offsets]
            for i in np.nonzero(unsure)[0]:
                pt = pts[i].tolist()
                keep[i] = all(sum(a * x for a, x in zip(row, pt)) <= o
                              for row, o in zip(rows, offs))
        pts = pts[keep]
        if not len(pts):
            return _empty(d)

        if 2 * params.delta ** params.d < 1 << 62:
            weights = np.array(params.key_weights, dtype=np.int64)
            keys = pts @ weights
            sel = np.asarray(params.hash_keys(keys) <= thr)
        else:
            sel = np.array([params.hash_point(pt) <= thr for pt in pts.tolist()])
        pts = pts[sel]
        return pts  # meshgrid order with ij indexing is lexicographic


def brute_select(params: HashParams, box, level):
    """Reference scan over the whole grid window; same predicates, no shortcuts."""
    thr = params.select_threshold(level)
    bounds = _grid_bounds(box, params.delta)
    if bounds is None:
        return _empty(params.d)
    lo, hi = bounds
    normals, offsets = box.halfspaces()
    rows = [[as_fraction(v) for v in row] for row in normals]
    offs = [as_fraction(v) for v in offsets]
    out = []
    for pt in itertools.product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        ok = all(sum(a * x for a, x in zip(row, pt)) <= off
                 for row, off in zip(rows, offs))
        if ok and params.hash_point(pt) <= thr:
            out.append(pt)
    return _canonical(out, params.d)


def _grid_bounds(box, delta):
    """Per-axis integer ranges covering the part of box inside [1..delta]^d,
    or None if they miss each other."""
    lo_f, hi_f = box.corner_bounds()
    lo = []
    hi = []
    for l, h in zip(lo_f, hi_f):
        # pad against float rounding in the corner bounds; the exact halfspace
        # tests discard any extra candidates this lets in
        pad_l = 1e-9 * (1.0 + abs(float(l)))
        pad_h = 1e-9 * (1.0 + abs(float(h)))
        a = max(1, math.ceil(as_fraction(float(l) - pad_l)))
        b = min(delta, math.floor(as_fraction(float(h) + pad_h)))
        if a > b:
            return None
        lo.append(a)
        hi.append(b)
    return lo, hi


def _canonical(points, d):
    if not len(points):
        return _empty(d)
    arr = np.array(sorted(set(map(tuple, points))), dtype=np.int64)
    return arr


def _empty(d):
    return np.zeros((0, d), dtype=np.int64)
