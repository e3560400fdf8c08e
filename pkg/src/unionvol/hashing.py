"""Pairwise-independent hashing over a d-dimensional integer grid.

Grid points x in {1..delta}^d are keyed injectively by
key(x) = sum_i delta^(i-1) * x_i (keys span a window narrower than p), and
hashed by h(x) = (a + b * key(x)) mod p for a prime p in [delta^d, 2*delta^d]
and uniform a, b.  Level-l selection keeps points with h(x) <= ceil(p/2^l)-1,
an event of probability q_l = ceil(p/2^l)/p in [2^-l, 2^-l+1).

Arithmetic is exact: Python integers everywhere, with a vectorised int64
fast path when the products provably fit.
"""

from dataclasses import dataclass

import numpy as np

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, exact for n < 3.3 * 10^24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n):
    """Smallest prime >= n."""
    c = max(int(n), 2)
    while not is_prime(c):
        c += 1
    return c


@dataclass(frozen=True)
class HashParams:
    """Immutable hash description; safe to share across threads."""

    delta: int
    d: int
    p: int
    a: int
    b: int

    @property
    def key_weights(self):
        return tuple(self.delta ** i for i in range(self.d))

    def key(self, x):
        """Injective integer key of a grid point (1-based coordinates)."""
        if len(x) != self.d:
            raise ValueError(f"point has dimension {len(x)}, expected {self.d}")
        total = 0
        for i, xi in enumerate(x):
            xi = int(xi)
            if not (1 <= xi <= self.delta):
                raise ValueError(f"coordinate {xi} outside 1..{self.delta}")
            total += self.delta ** i * xi
        return total

    def key_to_point(self, key):
        """Inverse of key(); raises on values not encoding a grid point."""
        rest = int(key) - sum(self.delta ** i for i in range(self.d))
        if rest < 0:
            raise ValueError(f"{key} does not encode a grid point")
        coords = []
        for _ in range(self.d):
            rest, digit = divmod(rest, self.delta)
            coords.append(digit + 1)
        if rest != 0:
            raise ValueError(f"{key} does not encode a grid point")
        return tuple(coords)

    def hash_point(self, x):
        return (self.a + self.b * self.key(x)) % self.p

    def hash_keys(self, keys):
        """Vectorised hash of an int array of keys."""
        keys = np.asarray(keys)
        if len(keys) == 0:
            return np.zeros(0, dtype=np.int64)
        key_max = 2 * self.delta ** self.d  # >= delta*(delta^d-1)/(delta-1)
        if self.a + self.b * key_max < 2 ** 62:
            vals = (self.a + self.b * keys.astype(np.int64)) % self.p
            return vals
        return np.array([(self.a + self.b * int(k)) % self.p for k in keys],
                        dtype=object)

    def select_threshold(self, l):
        """Hashes <= this value are selected at level l."""
        return -(-self.p // (1 << l)) - 1  # ceil(p / 2^l) - 1

    def select_probability(self, l):
        """q_l as an exact Fraction-free pair; use q_float for arithmetic."""
        return -(-self.p // (1 << l)), self.p

    def q_float(self, l):
        num, den = self.select_probability(l)
        return num / den

    def max_level(self):
        """Levels run 0 .. floor(log2 p)."""
        return self.p.bit_length() - 1


def _rand_below(rng, n):
    # rejection from whole random bytes; rng.integers caps out at int64
    nbytes = (n.bit_length() + 7) // 8
    span = 1 << (8 * nbytes)
    bound = span - span % n
    while True:
        r = int.from_bytes(rng.bytes(nbytes), "little")
        if r < bound:
            return r % n


def make_hash(delta, d, rng):
    """Fresh hash params: p is the smallest prime >= delta^d (hence < 2*delta^d),
    a and b uniform in [0, p)."""
    if delta < 2:
        raise ValueError("delta must be at least 2")
    p = next_prime(delta ** d)
    a = _rand_below(rng, p)
    b = _rand_below(rng, p)
    return HashParams(delta=delta, d=d, p=p, a=a, b=b)
