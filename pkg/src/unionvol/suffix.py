"""Insertion-only streaming with suffix union queries.

The stream keeps, for every sampling level l, a time-stamped Poisson sample
S(l) of intensity 2^-l restricted to the union of recent objects, plus a
cutoff s(l): the earliest insertion time still fully represented at that
level.  An insert erases points covered by the new object, draws
Pois(size / 2^l) fresh points, and when the level would overflow its budget
C evicts just enough of the oldest points (whole time batches at once) to
fit, advancing the cutoff.  A query for the union of objects s..now picks
the finest level whose cutoff admits s and scales its suffix count by 2^l.
Cutoffs never decrease.
"""

import math

import numpy as np

from .sampling import LOG, make_rng, poisson, pow2


class _Level:
    __slots__ = ("coords", "times", "cutoff")

    def __init__(self, dim):
        self.coords = np.empty((0, dim))
        self.times = np.empty(0, dtype=np.int64)
        self.cutoff = 1  # timestamps start at 1; nothing discarded yet


class SuffixStreamEstimator:
    def __init__(self, n, eps, seed=None, rng=None, dim=None, vol_bounds=None):
        if n < 2:
            raise ValueError("n must be at least 2")
        if not (0 < eps <= 1):
            raise ValueError("eps must be in (0, 1]")
        self.n = int(n)
        self.eps = float(eps)
        self.rng = rng if rng is not None else make_rng(seed)
        base = 3.0 * n / eps
        self.vol_lo, self.vol_hi = vol_bounds if vol_bounds else (base ** 2, base ** 4)
        self.max_level = math.ceil(5.0 * math.log2(base))
        self.capacity = 100.0 * LOG(n) / eps ** 2
        self.t = 0
        self._dim = dim
        self.levels = None
        if dim is not None:
            self.levels = [_Level(dim) for _ in range(self.max_level + 1)]

    def insert(self, obj):
        if self.t >= self.n:
            raise ValueError(f"stream budget n={self.n} exhausted")
        v = obj.size()
        if not (self.vol_lo <= v <= self.vol_hi):
            raise ValueError(f"object volume {v} outside admissible range "
                             f"[{self.vol_lo}, {self.vol_hi}]")
        if self.levels is None:
            self._dim = obj.dim
            self.levels = [_Level(obj.dim) for _ in range(self.max_level + 1)]
        self.t += 1
        cap = self.capacity
        for l, state in enumerate(self.levels):
            if len(state.times):
                keep = ~obj.contains_many(state.coords)
                if not keep.all():
                    state.coords = state.coords[keep]
                    state.times = state.times[keep]
            fresh = poisson(v / pow2(l), self.rng)
            if fresh > cap:
                # Level too fine for this object; drop it entirely and mark
                # everything before the next insert as unrepresented.
                state.coords = state.coords[:0]
                state.times = state.times[:0]
                state.cutoff = self.t + 1
                continue
            cutoff = self._eviction_cutoff(state, fresh)
            if cutoff > state.cutoff:
                idx = np.searchsorted(state.times, cutoff, side="left")
                state.coords = state.coords[idx:]
                state.times = state.times[idx:]
                state.cutoff = cutoff
            if fresh:
                state.coords = np.concatenate(
                    [state.coords, obj.sample_many(fresh, self.rng)])
                state.times = np.concatenate(
                    [state.times, np.full(fresh, self.t, dtype=np.int64)])

    def _eviction_cutoff(self, state, fresh):
        """Smallest cutoff a with fresh + #{time >= a} <= capacity.

        Ties share a timestamp and are evicted atomically, so the cutoff sits
        one past the newest evicted batch.  Requires fresh <= capacity.
        """
        max_keep = int(self.capacity) - fresh
        stored = len(state.times)
        if stored <= max_keep:
            return state.cutoff
        return int(state.times[stored - max_keep - 1]) + 1

    def estimate(self, s):
        """Size of the union of objects inserted at times >= s.

        s < 1 is clamped to 1 (the full stream); s == t+1 is the empty
        suffix and returns 0.0; s > t+1 is a usage error.
        """
        if s > self.t + 1:
            raise ValueError(f"suffix start {s} is in the future (t={self.t})")
        s = max(int(s), 1)
        if self.levels is None:
            return 0.0
        for l, state in enumerate(self.levels):
            if state.cutoff <= s:
                inside = len(state.times) - int(
                    np.searchsorted(state.times, s, side="left"))
                return pow2(l) * inside
        raise AssertionError("no level admits the suffix; cutoff invariant broken")

    def level_cutoffs(self):
        if self.levels is None:
            return [1] * (self.max_level + 1)
        return [state.cutoff for state in self.levels]

    def stored_points(self):
        if self.levels is None:
            return 0
        return sum(len(state.times) for state in self.levels)
