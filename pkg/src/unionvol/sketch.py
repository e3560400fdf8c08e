"""Linear k-sparse recovery sketch over integer keys.

Supports signed updates (insert/delete cancel exactly) and recovers the full
multiset support when at most k distinct keys are live.  Layout: R rows of
2k buckets; each bucket holds (count, keysum, fingerprint).  The fingerprint
is phi(key) = base^key mod q for a prime q >= max(key_space^2, 2^61) and a
random base, evaluated in exact integer arithmetic and memoised per key; see
_phi for why it must be nonlinear in the key.

Storage is two int64 limb arrays (low 32 bits, high bits) per row so batch
updates stay vectorised; limbs recombine mod q only when a bucket is probed.

Decoding peels verified singletons off a work queue, with a global
(count, keysum, fingerprint) accumulator cross-checked at the end.  Any
inconsistency, overload past k distinct keys, or unpeelable residue reports
"not recoverable" (None) rather than a wrong answer.
"""

import math
from collections import deque

import numpy as np

from .hashing import _rand_below, next_prime

_LIMB_BITS = 32
_LIMB_MASK = (1 << _LIMB_BITS) - 1
_MIN_FINGERPRINT_MOD = 1 << 61


class SparseSketch:
    """Recover up to k distinct keys from {0..key_space-1} with failure
    probability about delta_fail per decode."""

    def __init__(self, k, delta_fail, key_space, rng):
        if k < 1:
            raise ValueError("k must be positive")
        if not (0 < delta_fail < 1):
            raise ValueError("delta_fail must be in (0, 1)")
        if key_space < 2:
            raise ValueError("key_space must be at least 2")
        self.k = int(k)
        self.key_space = int(key_space)
        self.n_rows = math.ceil(math.log2(self.k / delta_fail)) + 2
        self.n_buckets = 2 * self.k

        self.bucket_mod = next_prime(self.key_space)
        self.fp_mod = next_prime(max(self.key_space ** 2, _MIN_FINGERPRINT_MOD))
        if self.fp_mod >= 1 << 62:
            raise ValueError("key space too large for 64-bit fingerprint limbs")
        self.row_a = [int(rng.integers(0, self.bucket_mod))
                      for _ in range(self.n_rows)]
        self.row_b = [int(rng.integers(1, self.bucket_mod))
                      for _ in range(self.n_rows)]
        self.fp_base = 2 + _rand_below(rng, self.fp_mod - 3)
        self._phi_memo = {}

        shape = (self.n_rows, self.n_buckets)
        self.counts = np.zeros(shape, dtype=np.int64)
        self.keysums = np.zeros(shape, dtype=np.int64)
        self.fp_lo = np.zeros(shape, dtype=np.int64)
        self.fp_hi = np.zeros(shape, dtype=np.int64)
        self.total_count = 0
        self.total_keysum = 0
        self.total_fp = 0

    # -- updates

    def update(self, keys, sign=1):
        """Apply a batch of +-1 updates; keys is any int sequence."""
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        keys = np.asarray(keys, dtype=np.int64)
        if keys.size == 0:
            return
        if keys.min() < 0 or keys.max() >= self.key_space:
            raise ValueError("key outside 0..key_space-1")
        fp_list = [self._phi(int(key)) for key in keys]
        fps = np.array(fp_list, dtype=np.int64)
        lo = (fps & _LIMB_MASK) * sign
        hi = (fps >> _LIMB_BITS) * sign
        for r in range(self.n_rows):
            idx = self._buckets(r, keys)
            np.add.at(self.counts[r], idx, sign)
            np.add.at(self.keysums[r], idx, keys * sign)
            np.add.at(self.fp_lo[r], idx, lo)
            np.add.at(self.fp_hi[r], idx, hi)
        self.total_count += sign * int(keys.size)
        self.total_keysum += sign * int(keys.sum())
        # sum in Python ints: batched int64 sums of ~2^61 values would wrap
        self.total_fp = (self.total_fp + sign * sum(fp_list)) % self.fp_mod

    def insert(self, key):
        self.update([key], 1)

    def delete(self, key):
        self.update([key], -1)

    def _phi(self, key):
        # Fingerprints must be nonlinear in the key: for any affine phi, a
        # bucket with c | keysum satisfies sum(phi) == c * phi(keysum/c)
        # identically, so false singletons would always verify.  base^key
        # mod q is sound for signed multisets by polynomial identity
        # testing: a false verify needs the random base to be a root of a
        # nonzero degree-<key_space polynomial, probability key_space/q.
        fp = self._phi_memo.get(key)
        if fp is None:
            fp = self._phi_memo[key] = pow(self.fp_base, key, self.fp_mod)
        return fp

    def _buckets(self, r, keys):
        a, b, p = self.row_a[r], self.row_b[r], self.bucket_mod
        if a + b * (self.key_space - 1) < 1 << 62:
            return ((a + b * keys) % p) % self.n_buckets
        vals = [((a + b * int(key)) % p) % self.n_buckets for key in keys]
        return np.array(vals, dtype=np.int64)

    # -- state

    def snapshot(self):
        return (self.counts.copy(), self.keysums.copy(),
                self.fp_lo.copy(), self.fp_hi.copy(),
                self.total_count, self.total_keysum, self.total_fp)

    def state_equal(self, snap):
        counts, keysums, lo, hi, tc, tks, tfp = snap
        return (np.array_equal(self.counts, counts)
                and np.array_equal(self.keysums, keysums)
                and np.array_equal(self.fp_lo, lo)
                and np.array_equal(self.fp_hi, hi)
                and self.total_count == tc
                and self.total_keysum == tks
                and self.total_fp == tfp)

    def is_zero(self):
        return (self.total_count == 0 and self.total_keysum == 0
                and self.total_fp == 0
                and not self.counts.any() and not self.keysums.any()
                and not self.fp_lo.any() and not self.fp_hi.any())

    # -- recovery

    def decode(self):
        """The live multiset as {key: count}, or None when not recoverable
        (more than k distinct keys, or a corrupted/unlucky decode)."""
        # a nonzero bucket always holds at least one live key, so a row with
        # more than k nonzero buckets certifies support > k without peeling
        for r in range(self.n_rows):
            if np.count_nonzero(self.counts[r]) > self.k:
                return None

        counts = self.counts.copy()
        keysums = self.keysums.copy()
        fp_lo = self.fp_lo.copy()
        fp_hi = self.fp_hi.copy()
        q = self.fp_mod

        support = {}
        queue = deque(map(tuple, np.argwhere(counts != 0).tolist()))
        peels = 0
        max_peels = 8 * self.k + 16
        while queue:
            r, i = queue.popleft()
            c = int(counts[r, i])
            if c == 0:
                continue
            ks = int(keysums[r, i])
            if ks % c != 0:
                continue
            e = ks // c
            if not (0 <= e < self.key_space):
                continue
            fp = ((int(fp_hi[r, i]) << _LIMB_BITS) + int(fp_lo[r, i])) % q
            if fp != c * self._phi(e) % q:
                continue
            peels += 1
            if peels > max_peels:
                return None
            support[e] = support.get(e, 0) + c
            if support[e] == 0:
                del support[e]
            if len(support) > self.k:
                return None
            phi_e = self._phi(e)
            lo_delta = (phi_e & _LIMB_MASK) * c
            hi_delta = (phi_e >> _LIMB_BITS) * c
            key_arr = np.array([e], dtype=np.int64)
            for rr in range(self.n_rows):
                j = int(self._buckets(rr, key_arr)[0])
                counts[rr, j] -= c
                keysums[rr, j] -= c * e
                fp_lo[rr, j] -= lo_delta
                fp_hi[rr, j] -= hi_delta
                if counts[rr, j] != 0:
                    queue.append((rr, j))

        if counts.any() or keysums.any() or fp_lo.any() or fp_hi.any():
            return None
        if sum(support.values()) != self.total_count:
            return None
        if sum(e * c for e, c in support.items()) != self.total_keysum:
            return None
        if sum(c * self._phi(e) for e, c in support.items()) % q != self.total_fp:
            return None
        return support
