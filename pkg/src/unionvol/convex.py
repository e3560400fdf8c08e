"""Low-space dynamic streaming estimator for unions of convex bodies.

The continuous problem is discretised: scale space by lam so bodies live on
the grid {1..delta}^d, estimate the number of grid points covered by the
current union, and divide by lam^d to get volume back.  Grid-point counting
is a dynamic distinct-elements problem solved with one shared hash and a
k-sparse recovery sketch per subsampling level: level l keeps each grid point
with probability about 2^-l, and the deepest level whose sketch overflows
pins the scale of the answer.

Per-body work happens once at insert time: candidate points come from the
grid filter applied to a (possibly sampled) enclosing box, the body oracle
prunes them, and each level stores its hash-selected subset.  Deletions
replay the cached batches with the opposite sign, so insert/delete pairs
cancel exactly.  Space guardrails: level count and total sketch footprint
are checked up front, and a per-insert gate skips (and permanently retires)
any level asked to store an oversized batch.
"""

import math
from dataclasses import dataclass

import numpy as np

from .ellipsoid import RotatedBox, bounding_box
from .geometry import ObjectOracle
from .gridfilter import GridFilter
from .hashing import make_hash
from .sampling import make_rng
from .sketch import SparseSketch

_MAX_LEVELS = 64
_MAX_SKETCH_BYTES = 2 * 1024 ** 3
_GATE_FACTOR = 1600.0
_SKETCH_RATE_FACTOR = 100.0


def discretization_for(n, eps, r, outer, d):
    """Conservative grid schedule: scale lam = 18 d^1.5 n / (eps r) for bodies
    with inradius >= r inside [0, outer]^d; grid width floor(lam*outer) + 1."""
    lam = 18.0 * d ** 1.5 * n / (eps * r)
    delta = int(math.floor(lam * outer)) + 1
    return lam, delta


class ScaledBody(ObjectOracle):
    """View of a convex body under x -> lam * x, exposing grid coordinates."""

    def __init__(self, body, lam):
        super().__init__(body.size() * lam ** body.dim)
        self.body = body
        self.lam = float(lam)
        self.dim = body.dim

    def _sample_many(self, count, rng):
        return self.body.sample_many(count, rng) * self.lam

    def _contains_many(self, pts):
        return self.body.contains_many(np.asarray(pts, dtype=float) / self.lam)

    def axis_box(self):
        box = self.body.axis_box()
        if box is None:
            return None
        lo, hi = box
        return np.asarray(lo) * self.lam, np.asarray(hi) * self.lam


@dataclass
class _CacheEntry:
    count: int
    box: RotatedBox
    level_keys: list  # per level: int64 key array, or None when gated


class ConvexStreamEstimator:
    """Dynamic stream of convex bodies in grid coordinates ({1..delta}^d).

    Bodies are opaque oracles; the same handle must be passed to delete as
    was passed to insert.  estimate_count() returns the estimated number of
    covered grid points (nan on sketch failure), estimate_volume() divides
    by lam^d.
    """

    def __init__(self, n, eps, delta, d, lam=None, seed=None, rng=None,
                 hash_params=None, box_mode="calibrated", filter_method="scan"):
        if n < 2:
            raise ValueError("n must be at least 2")
        if not (0 < eps < 1):
            raise ValueError("eps must be in (0, 1)")
        self.n = int(n)
        self.eps = float(eps)
        self.d = int(d)
        self.lam = float(lam) if lam is not None else 1.0
        self.rng = rng if rng is not None else make_rng(seed)
        self.hash = hash_params if hash_params is not None \
            else make_hash(delta, d, self.rng)
        if self.hash.delta != delta or self.hash.d != d:
            raise ValueError("hash params disagree with delta/d")
        self.filter = GridFilter(self.hash, method=filter_method)
        self.box_mode = box_mode

        self.n_levels = self.hash.max_level() + 1
        if self.n_levels > _MAX_LEVELS:
            raise ValueError(f"{self.n_levels} subsampling levels exceeds "
                             f"the {_MAX_LEVELS}-level guardrail")
        self.sketch_k = math.ceil(_SKETCH_RATE_FACTOR / self.eps ** 2)
        self.sketch_delta = 1.0 / (20.0 * self.n_levels)
        rows = math.ceil(math.log2(self.sketch_k / self.sketch_delta)) + 2
        footprint = self.n_levels * rows * 2 * self.sketch_k * 4 * 8
        if footprint > _MAX_SKETCH_BYTES:
            raise ValueError(f"sketch footprint {footprint} bytes exceeds "
                             f"the {_MAX_SKETCH_BYTES}-byte guardrail")

        key_space = delta ** d  # width of the shifted key window
        self._key_shift = self.hash.key([1] * d)
        self.levels = [SparseSketch(self.sketch_k, self.sketch_delta,
                                    key_space, self.rng)
                       for _ in range(self.n_levels)]
        self.saturated = [False] * self.n_levels
        self._thresholds = [self.hash.select_threshold(l)
                            for l in range(self.n_levels)]
        self._cache = {}
        self.ops_done = 0
        self.failures = 0

    # -- bookkeeping

    def _charge_op(self):
        if self.ops_done >= self.n:
            raise RuntimeError(f"operation budget n={self.n} exhausted")
        self.ops_done += 1

    def _gate(self, level):
        q = self.hash.q_float(level)
        return _GATE_FACTOR / (self.eps ** 2 * q)

    def _body_batches(self, body):
        """Cacheable per-body state: enclosing box plus per-level key arrays.

        Level selections nest (thresholds shrink with the level), so one
        level-0 enumeration plus one oracle pass covers every level.
        """
        box = bounding_box(body, self.n, self.rng, mode=self.box_mode)
        candidates = self.filter.select(box, 0)
        if len(candidates):
            inside = body.contains_many(candidates.astype(float))
            pts = candidates[inside]
        else:
            pts = candidates
        if len(pts):
            weights = np.array(self.hash.key_weights, dtype=np.int64)
            keys = pts @ weights
            hashes = np.asarray(self.hash.hash_keys(keys), dtype=np.int64)
            shifted = keys - self._key_shift
        else:
            hashes = np.zeros(0, dtype=np.int64)
            shifted = np.zeros(0, dtype=np.int64)
        level_keys = []
        for l in range(self.n_levels):
            sel = shifted[hashes <= self._thresholds[l]]
            if len(sel) > self._gate(l):
                level_keys.append(None)
            else:
                level_keys.append(sel)
        return box, level_keys

    # -- stream operations

    def insert(self, body):
        self._charge_op()
        entry = self._cache.get(body)
        if entry is None:
            box, level_keys = self._body_batches(body)
            entry = _CacheEntry(0, box, level_keys)
            self._cache[body] = entry
        entry.count += 1
        for l, keys in enumerate(entry.level_keys):
            if keys is None:
                self.saturated[l] = True
            elif not self.saturated[l]:
                self.levels[l].update(keys, 1)

    def delete(self, body):
        self._charge_op()
        entry = self._cache.get(body)
        if entry is None or entry.count == 0:
            raise KeyError("delete of a body that is not in the multiset")
        entry.count -= 1
        for l, keys in enumerate(entry.level_keys):
            if keys is not None and not self.saturated[l]:
                self.levels[l].update(keys, -1)
        if entry.count == 0:
            del self._cache[body]

    def live_count(self):
        return sum(e.count for e in self._cache.values())

    # -- queries

    def level_support(self, level):
        """Decoded multiset at a level, or None when unrecoverable."""
        if self.saturated[level]:
            return None
        return self.levels[level].decode()

    def estimate_count(self):
        """Estimated number of covered grid points; nan when even the finest
        level is overloaded.

        Top-down scan: supports shrink geometrically with the level, so
        walking from the finest level to the first unrecoverable one touches
        about 2k elements total regardless of the union's size.
        """
        self._charge_op()
        prev = None
        for l in range(self.n_levels - 1, -1, -1):
            sup = self.level_support(l)
            if sup is None:
                if prev is None:
                    self.failures += 1
                    return float("nan")
                return len(prev) / self.hash.q_float(l + 1)
            prev = sup
        return len(prev) / self.hash.q_float(0)

    def estimate_volume(self):
        return self.estimate_count() / self.lam ** self.d


class MedianConvexEstimator:
    """Median of independent copies; copies share the grid (hence the prime
    modulus) but draw their own hash coefficients and sketches."""

    def __init__(self, n, eps, delta, d, copies=15, lam=None, seed=None,
                 box_mode="calibrated", filter_method="scan"):
        if copies < 1 or copies % 2 == 0:
            raise ValueError("copies must be odd and positive")
        seeds = np.random.SeedSequence(seed).spawn(copies)
        self.copies = [ConvexStreamEstimator(
            n, eps, delta, d, lam=lam, rng=np.random.default_rng(s),
            box_mode=box_mode, filter_method=filter_method)
            for s in seeds]
        self.failures = 0

    def insert(self, body):
        for c in self.copies:
            c.insert(body)

    def delete(self, body):
        for c in self.copies:
            c.delete(body)

    def estimate_count(self):
        vals = [c.estimate_count() for c in self.copies]
        good = [v for v in vals if not math.isnan(v)]
        if len(good) <= len(vals) // 2:
            self.failures += 1
            return float("nan")
        return float(np.median(good))

    def estimate_volume(self):
        lam = self.copies[0].lam
        d = self.copies[0].d
        return self.estimate_count() / lam ** d
