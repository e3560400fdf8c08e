"""Fully dynamic union-size estimation over insertions and deletions.

Objects live in bins 0..B arranged as a binary counter: an insert picks the
lowest bin h whose cumulative occupancy fits 2^h, merges everything below it
(and bin h itself) into a freshly initialised decremental digest, and empties
the lower bins.  Deletions hit the digest of the bin that holds the object.
Each bin runs at precision eps / (1 + log2 n) so the per-bin errors sum to
eps across the at most 1 + log2 n occupied bins.

Points additionally carry a cross-bin counter n_x = number of live objects
in strictly lower bins that contain the point; the estimate counts only
points with n_x == 0, which de-duplicates overlap between bins:

    estimate = sum over bins of 2^L_j * |{x in S_j : n_x = 0}|.
"""

import math

import numpy as np

from .digest import DecrementalDigest, DigestConfig
from .geometry import coverage_count
from .klm import KlmConfig
from .sampling import make_rng, pow2


class DynamicUnionEstimator:
    """Insert/delete/estimate over an object multiset, within an op budget."""

    def __init__(self, n, eps, seed=None, rng=None, klm=None, vol_bounds=None):
        if n < 2:
            raise ValueError("n must be at least 2")
        if not (0 < eps <= 1):
            raise ValueError("eps must be in (0, 1]")
        self.n = int(n)
        self.eps = float(eps)
        self.rng = rng if rng is not None else make_rng(seed)
        self.eps_bin = eps / (1.0 + math.log2(n))
        base = 3.0 * n / eps
        self.vol_lo, self.vol_hi = vol_bounds if vol_bounds else (base ** 2, base ** 4)
        self.max_bin = math.ceil(math.log2(n)) + 1
        cfg = lambda: DigestConfig(n=self.n, eps=self.eps_bin,
                                   vol_lo=self.vol_lo, vol_hi=self.vol_hi,
                                   klm=klm or KlmConfig())
        self.bins = [DecrementalDigest(cfg(), self.rng)
                     for _ in range(self.max_bin + 1)]
        self.nx = [np.empty(0, dtype=np.int64) for _ in range(self.max_bin + 1)]
        # Object handle -> {bin index: occurrence count}; the handle is the
        # object instance itself (identity semantics, repeats allowed).
        self._where = {}
        self.ops_done = 0

    # -- operations ------------------------------------------------------

    def insert(self, obj):
        self._charge_op()
        v = obj.size()
        if not (self.vol_lo <= v <= self.vol_hi):
            raise ValueError(f"object volume {v} outside admissible range "
                             f"[{self.vol_lo}, {self.vol_hi}]")
        occupancy = 0
        h = None
        for j in range(self.max_bin + 1):
            occupancy += len(self.bins[j].objects)
            if 1 + occupancy <= 2 ** j:
                h = j
                break
        if h is None:
            raise AssertionError("bin capacity exhausted; op budget violated?")

        merged = list(self.bins[h].objects)
        for j in range(h):
            for moved in self.bins[j].objects:
                self._where[moved][j] -= 1
                if self._where[moved][j] == 0:
                    del self._where[moved][j]
                self._where[moved][h] = self._where[moved].get(h, 0) + 1
            merged.extend(self.bins[j].objects)
            self.bins[j].initialize([])
            self.nx[j] = np.empty(0, dtype=np.int64)
        merged.append(obj)
        slot = self._where.setdefault(obj, {})
        slot[h] = slot.get(h, 0) + 1

        self.bins[h].initialize(merged)
        # Lower bins are empty now, so bin h's fresh points have n_x = 0.
        self.nx[h] = np.zeros(self.bins[h].sample_size(), dtype=np.int64)
        # The new object sits below every higher bin.
        for k in range(h + 1, self.max_bin + 1):
            if self.bins[k].sample_size():
                self.nx[k] += obj.contains_many(self.bins[k].coords)

    def delete(self, obj):
        self._charge_op()
        slot = self._where.get(obj)
        if not slot:
            raise KeyError("delete of an object that is not live")
        j = min(slot)
        slot[j] -= 1
        if slot[j] == 0:
            del slot[j]
        if not slot:
            del self._where[obj]

        old_uids = self.bins[j].uids
        refreshed = self.bins[j].delete(obj)
        if refreshed:
            self._recount_nx(j)
        else:
            # The digest only dropped points; realign n_x by sample id.
            new_uids = self.bins[j].uids
            if len(new_uids) != len(old_uids):
                pos = np.searchsorted(old_uids, new_uids)
                self.nx[j] = self.nx[j][pos]
        # The object left bin j, so points of strictly higher bins that it
        # covers lose one lower-bin coverer.  Bin j's own points track only
        # bins below j and are unaffected.
        for k in range(j + 1, self.max_bin + 1):
            if self.bins[k].sample_size():
                self.nx[k] -= obj.contains_many(self.bins[k].coords)
        return refreshed

    def estimate(self):
        self._charge_op()
        return self._estimate_value()

    # -- helpers ---------------------------------------------------------

    def live_count(self):
        return sum(len(b.objects) for b in self.bins)

    def _estimate_value(self):
        total = 0.0
        for j, digest in enumerate(self.bins):
            count = digest.sample_size()
            if not count:
                continue
            fresh = int(np.count_nonzero(self.nx[j] == 0))
            total += pow2(digest.L) * fresh
        return total

    def _recount_nx(self, j):
        lower = [o for jj in range(j) for o in self.bins[jj].objects]
        if self.bins[j].sample_size():
            self.nx[j] = coverage_count(lower, self.bins[j].coords)
        else:
            self.nx[j] = np.empty(0, dtype=np.int64)

    def check_nx(self):
        """Exhaustive recount of every cross-bin counter (test hook)."""
        for j in range(self.max_bin + 1):
            lower = [o for jj in range(j) for o in self.bins[jj].objects]
            if self.bins[j].sample_size():
                want = coverage_count(lower, self.bins[j].coords)
            else:
                want = np.empty(0, dtype=np.int64)
            if not np.array_equal(want, self.nx[j]):
                return False
        return True

    def _charge_op(self):
        if self.ops_done >= self.n:
            raise ValueError(f"operation budget n={self.n} exhausted")
        self.ops_done += 1
