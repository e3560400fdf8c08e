"""Seeded randomness primitives shared by every estimator.

All estimators draw their randomness from a single numpy Generator created
by make_rng(seed), so a (seed, operation sequence) pair replays bit-for-bit.
"""

import math

import numpy as np

# All sampling thresholds in this package use the natural logarithm; base-2
# logs appear only in doubling indices (levels, bins).  Keep the choice in
# one place so it cannot drift module by module.
LOG = math.log

# Level window: level(v) is the unique l with
#   LEVEL_WINDOW_LO * ln(n)/eps^2  <=  v / 2^l  <  LEVEL_WINDOW_HI * ln(n)/eps^2
LEVEL_WINDOW_LO = 32.0
LEVEL_WINDOW_HI = 64.0

# Below this rate Poisson draws use sequential inversion, above it the
# transformed-rejection method.  Inversion is exact but O(rate).
_POISSON_INVERSION_CUTOFF = 30.0


def make_rng(seed):
    """One Generator per estimator instance; never share across instances."""
    return np.random.default_rng(seed)


def poisson(rate, rng):
    """Draw one Poisson variate.  Deterministic given the generator state.

    rate == 0 returns 0 without consuming randomness; this is the sentinel
    path used when a sampling level is +infinity.
    """
    if rate < 0 or not math.isfinite(rate):
        raise ValueError(f"poisson rate must be finite and >= 0, got {rate}")
    if rate == 0.0:
        return 0
    if rate < _POISSON_INVERSION_CUTOFF:
        return _poisson_inversion(rate, rng)
    return _poisson_ptrs(rate, rng)


def _poisson_inversion(rate, rng):
    # Sequential search on the CDF; safe from underflow for rate < ~700,
    # used only below the cutoff.
    u = rng.random()
    p = math.exp(-rate)
    cdf = p
    k = 0
    while u > cdf:
        k += 1
        p *= rate / k
        cdf += p
        if p == 0.0:  # exhausted float resolution; u was in the far tail
            break
    return k


def _poisson_ptrs(rate, rng):
    # Hoermann's transformed rejection with squeeze (PTRS).  Valid for
    # rate >= 10; we only call it above the inversion cutoff.
    smu = math.sqrt(rate)
    b = 0.931 + 2.53 * smu
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_rate = math.log(rate)
    while True:
        u = rng.random() - 0.5
        v = rng.random()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + rate + 0.43)
        if us >= 0.07 and v <= v_r:
            return k
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(inv_alpha) - math.log(a / (us * us) + b)
                <= k * log_rate - rate - math.lgamma(k + 1.0)):
            return k


def level(vol, n, eps):
    """The unique integer l placing vol/2^l inside the level window.

    Raises ValueError on non-positive or non-finite volume.  The result may
    be negative when vol is small relative to ln(n)/eps^2; callers that need
    non-negative levels must enforce their own volume admissibility range.
    """
    if not (vol > 0.0 and math.isfinite(vol)):
        raise ValueError(f"volume must be positive and finite, got {vol}")
    if n < 2:
        raise ValueError("n must be at least 2")
    t = LEVEL_WINDOW_LO * LOG(n) / (eps * eps)
    l = math.floor(math.log2(vol / t))
    # ldexp(t, l) == t * 2^l exactly, so the window predicate is evaluated
    # without extra rounding; the floor above can be off by one at the edges.
    while math.ldexp(t, l) > vol:
        l -= 1
    while math.ldexp(t, l + 1) <= vol:
        l += 1
    return l


def pow2(l):
    """2^l for integer or +inf l, as a float."""
    if math.isinf(l):
        return math.inf
    return math.ldexp(1.0, int(l))


def poisson_many(rates, rng):
    """Vectorised helper: one draw per rate, same law as poisson()."""
    return np.array([poisson(float(r), rng) for r in np.atleast_1d(rates)],
                    dtype=np.int64)
