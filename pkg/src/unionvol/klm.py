"""Static union-size estimation by coverage sampling.

One trial draws an object proportionally to its size, a uniform point x
inside it, then repeatedly tests uniformly random objects until one contains
x, counting the tests.  The expected number of tests per trial is
m * vol(union) / T, so the total test count N over S trials gives the
unbiased estimate N * T / (S * m).  With S = ceil(c * ln n) trials the
estimate is within a factor (1 +- 1/2) of the union size with probability
at least 1 - n^-3, using O(m log n) oracle queries.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .sampling import LOG

# Candidate objects for the test loop are drawn in blocks; one RNG call per
# block instead of per step keeps the waiting loop off the numpy call path.
_STEP_BLOCK = 32


@dataclass
class KlmConfig:
    # Trial count multiplier: S = ceil(c_trials * ln n).
    c_trials: float = 120.0
    # Per-trial test budget multiplier: a trial is restarted after
    # step_cap_factor * m * ln(n) membership tests (diagnostic only; the
    # probability of hitting the cap is n^-Omega(log n)).
    step_cap_factor: float = 64.0


@dataclass
class KlmStats:
    trials: int = 0
    tests: int = 0
    restarts: int = 0


def klm_estimate(objects, n, rng, config=None, stats=None):
    """Estimate the measure of the union of `objects`.

    n is the reliability parameter (failure probability n^-3), independent
    of the number of objects.  Returns 0.0 for an empty list.
    """
    if config is None:
        config = KlmConfig()
    if stats is None:
        stats = KlmStats()
    m = len(objects)
    if m == 0:
        return 0.0
    if n < 2:
        raise ValueError("n must be at least 2")

    sizes = [obj.size() for obj in objects]
    t = float(sum(sizes))
    weights = [s / t for s in sizes]
    s_trials = math.ceil(config.c_trials * LOG(n))
    step_cap = config.step_cap_factor * m * LOG(n)

    total_tests = 0
    picks = rng.choice(m, size=s_trials, p=weights)
    block = ()
    bpos = 0
    for k in range(s_trials):
        i = int(picks[k])
        while True:  # restart loop; re-entered only if the step cap trips
            x = objects[i].sample(rng)
            tests = 0
            hit = False
            while tests < step_cap:
                if bpos == len(block):
                    block = rng.integers(0, m, size=_STEP_BLOCK).tolist()
                    bpos = 0
                j = block[bpos]
                bpos += 1
                tests += 1
                if objects[j].contains(x):
                    hit = True
                    break
            if hit:
                total_tests += tests
                break
            stats.restarts += 1
            i = int(rng.choice(m, p=weights))
    stats.trials += s_trials
    stats.tests += total_tests
    return total_tests * t / (s_trials * m)
