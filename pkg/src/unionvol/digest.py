"""Decremental union digest: erase-and-resample Poisson sampling.

The digest holds a multiset of objects, a sampling level L, and a point
sample S distributed (absent an abort) as a Poisson process of intensity
2^-L restricted to the union, so that 2^L * |S| estimates the union size.
Each point carries a live-coverage counter m_x; deletions decrement the
counters of covered points and drop points whose counter reaches zero, and
when S falls below a floor the whole digest refreshes: restimate the union
coarsely, lower L, and resample from scratch.  L never increases between
initializations, which bounds the number of refreshes over any deletion
sequence by the level range, O(log(n/eps)).

The empty multiset is the sentinel state (L = +inf, S = {}).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import coverage_count
from .klm import KlmConfig, KlmStats, klm_estimate
from .sampling import LOG, level, poisson, pow2


@dataclass
class DigestConfig:
    """All sampling thresholds for the digest live here, never inlined."""

    n: int
    eps: float
    # Resample aborts when the intermediate sample would exceed
    # resample_cap_factor * ln(n) / eps^2 points.
    resample_cap_factor: float = 160.0
    # A deletion triggers a refresh when |S| falls below
    # refill_floor_factor * ln(n) / eps^2.
    refill_floor_factor: float = 24.0
    # Volume admissibility window for initialize; defaults to
    # [(3n/eps)^2, (3n/eps)^4] but callers that run many digests at a finer
    # internal eps pass the range of the outer problem instead.
    vol_lo: float = None
    vol_hi: float = None
    # Bound on back-to-back refresh passes inside one trigger; each pass
    # lowers L so the expected sample doubles, and in practice one or two
    # passes suffice.
    max_refresh_rounds: int = 4
    klm: KlmConfig = field(default_factory=KlmConfig)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not (0 < self.eps <= 1):
            raise ValueError("eps must be in (0, 1]")
        base = 3.0 * self.n / self.eps
        if self.vol_lo is None:
            self.vol_lo = base ** 2
        if self.vol_hi is None:
            self.vol_hi = base ** 4

    @property
    def resample_cap(self):
        return self.resample_cap_factor * LOG(self.n) / self.eps ** 2

    @property
    def refill_floor(self):
        return self.refill_floor_factor * LOG(self.n) / self.eps ** 2


def resample(objects, sampling_level, rng, cap, dim=None):
    """Draw a fresh level-L sample of the union, or None on abort.

    Objects are processed in the stored order: points covered by the current
    object are erased, then Pois(size / 2^L) fresh uniform points of the
    object are appended.  The abort fires as soon as the intermediate sample
    would exceed `cap` points; the returned value is None in that case so
    callers can distinguish an abort from a genuinely empty sample.
    """
    if dim is None:
        dim = objects[0].dim if objects else 0
    coords = np.empty((0, dim))
    denom = pow2(sampling_level)
    for obj in objects:
        if len(coords):
            coords = coords[~obj.contains_many(coords)]
        rate = 0.0 if math.isinf(denom) else obj.size() / denom
        fresh = poisson(rate, rng)
        if len(coords) + fresh > cap:
            return None
        if fresh:
            coords = np.concatenate([coords, obj.sample_many(fresh, rng)])
    return coords


class DecrementalDigest:
    """Deletion-only union-size digest over an object multiset."""

    def __init__(self, config, rng):
        self.config = config
        self.rng = rng
        self.objects = []
        self.L = math.inf
        self.coords = np.empty((0, 0))
        self.uids = np.empty(0, dtype=np.int64)
        self.m = np.empty(0, dtype=np.int64)
        self._next_uid = 0
        self.klm_stats = KlmStats()
        self.refresh_passes = 0
        self.delete_refreshes = 0
        self.aborts = 0

    # -- queries ---------------------------------------------------------

    def sample_size(self):
        return len(self.uids)

    def estimate(self):
        """2^L * |S|; exactly 0.0 for the empty sentinel state."""
        if not len(self.uids):
            return 0.0
        return pow2(self.L) * len(self.uids)

    # -- operations ------------------------------------------------------

    def initialize(self, objects):
        cfg = self.config
        for obj in objects:
            v = obj.size()
            if not (cfg.vol_lo <= v <= cfg.vol_hi):
                raise ValueError(
                    f"object volume {v} outside admissible range "
                    f"[{cfg.vol_lo}, {cfg.vol_hi}]")
        self.objects = list(objects)
        self.L = math.inf
        self._set_sample(np.empty((0, objects[0].dim if objects else 0)))
        self._refresh_until_filled()

    def refresh(self):
        """One refresh pass: re-estimate, lower L, resample, recount."""
        self.refresh_passes += 1
        if not self.objects:
            self.L = math.inf
            self._set_sample(self.coords[:0])
            return
        cfg = self.config
        v = klm_estimate(self.objects, cfg.n, self.rng, cfg.klm, self.klm_stats)
        l_new = level(v, cfg.n, cfg.eps)
        self.L = min(self.L - 1, l_new)
        coords = resample(self.objects, self.L, self.rng, cfg.resample_cap,
                          dim=self.objects[0].dim)
        if coords is None:
            self.aborts += 1
            coords = np.empty((0, self.objects[0].dim))
        self._set_sample(coords)
        self.m = coverage_count(self.objects, self.coords)

    def delete(self, obj):
        """Remove one occurrence of obj; True if a refresh was triggered."""
        try:
            self.objects.remove(obj)
        except ValueError:
            raise KeyError("delete of an object not in the multiset") from None
        if len(self.uids):
            hit = obj.contains_many(self.coords)
            self.m = self.m - hit
            keep = self.m > 0
            if not keep.all():
                self.coords = self.coords[keep]
                self.uids = self.uids[keep]
                self.m = self.m[keep]
        if len(self.uids) < self.config.refill_floor:
            self.delete_refreshes += 1
            self._refresh_until_filled()
            return True
        return False

    # -- internals -------------------------------------------------------

    def _set_sample(self, coords):
        self.coords = coords
        n = len(coords)
        self.uids = np.arange(self._next_uid, self._next_uid + n, dtype=np.int64)
        self._next_uid += n
        self.m = np.zeros(n, dtype=np.int64)

    def _refresh_until_filled(self):
        # A single pass can come up short when L lands at the top of the
        # level window or the resample aborts; each extra pass lowers L by
        # at least one, so the expected sample doubles and the loop exits.
        floor = self.config.refill_floor
        for _ in range(self.config.max_refresh_rounds):
            self.refresh()
            if not self.objects or len(self.uids) >= floor:
                break
