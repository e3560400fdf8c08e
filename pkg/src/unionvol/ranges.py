"""Volume-range reduction: lift the bounded-aspect-ratio restriction.

The wrapped estimators only accept volumes within a polynomial window.  The
wrapper buckets objects into overlapping classes by volume, each class
spanning a factor scale^2 = (3n/eps)^2 and every object landing in exactly
two consecutive classes.  Per class it runs an inner estimator at precision
eps/3 on measure-rescaled oracles (geometry untouched, size() multiplied by
scale^(3-l)), so all inner volumes sit in (scale^2, scale^4].  Because the
top two active classes are always consecutive, the second-largest class
contains every live object of the largest, and its estimate rescaled by
scale^(l-3) is within (1 +- eps) of the true union.
"""

import bisect
import math

from .sampling import make_rng


class ScaledOracle:
    """Same geometry, rescaled measure; the wrapper's handle for one class."""

    def __init__(self, base, factor):
        self.base = base
        self.factor = float(factor)
        self.dim = base.dim

    def size(self):
        return self.base.size() * self.factor

    def sample(self, rng):
        return self.base.sample(rng)

    def sample_many(self, count, rng):
        return self.base.sample_many(count, rng)

    def contains(self, point):
        return self.base.contains(point)

    def contains_many(self, points):
        return self.base.contains_many(points)

    def axis_box(self):
        return self.base.axis_box()


def volume_classes(vol, scale):
    """The two consecutive class indices l with scale^(l-1) < vol <= scale^(l+1)."""
    g = math.log(vol) / math.log(scale)
    hits = [l for l in range(math.floor(g) - 2, math.floor(g) + 3)
            if scale ** (l - 1) < vol <= scale ** (l + 1)]
    if len(hits) != 2 or hits[1] != hits[0] + 1:
        raise AssertionError(f"class window arithmetic failed for vol={vol}")
    return hits


class _ClassState:
    __slots__ = ("estimator", "count", "wrappers", "times")

    def __init__(self, estimator):
        self.estimator = estimator
        self.count = 0
        self.wrappers = {}   # base object -> ScaledOracle for this class
        self.times = []      # global insert times, ascending (suffix mode)


class RangeReduction:
    """Wrap an inner estimator family to accept arbitrary positive volumes.

    inner_factory(n, eps, vol_bounds, rng) must return a fresh estimator
    exposing insert/delete/estimate (or insert/estimate(s) for suffix use).
    """

    def __init__(self, inner_factory, n, eps, seed=None, rng=None):
        if n < 2:
            raise ValueError("n must be at least 2")
        self.n = int(n)
        self.eps = float(eps)
        self.rng = rng if rng is not None else make_rng(seed)
        self.scale = 3.0 * n / eps
        self.eps_inner = eps / 3.0
        # Slack absorbs float rounding in vol * scale^(3-l) at the window edges.
        self.inner_bounds = (self.scale ** 2 * (1 - 1e-9),
                             self.scale ** 4 * (1 + 1e-9))
        self.inner_factory = inner_factory
        self.classes = {}
        self.t = 0

    # -- operations ------------------------------------------------------

    def insert(self, obj):
        self.t += 1
        vol = obj.size()
        for l in volume_classes(vol, self.scale):
            state = self.classes.get(l)
            if state is None:
                inner = self.inner_factory(self.n, self.eps_inner,
                                           self.inner_bounds, self.rng)
                state = self.classes[l] = _ClassState(inner)
            wrapper = state.wrappers.get(obj)
            if wrapper is None:
                wrapper = state.wrappers[obj] = ScaledOracle(
                    obj, self.scale ** (3 - l))
            state.estimator.insert(wrapper)
            state.count += 1
            state.times.append(self.t)

    def delete(self, obj):
        vol = obj.size()
        for l in volume_classes(vol, self.scale):
            state = self.classes.get(l)
            if state is None or obj not in state.wrappers:
                raise KeyError("delete of an object that is not live")
            state.count -= 1
            if state.count == 0:
                del self.classes[l]
            else:
                state.estimator.delete(state.wrappers[obj])

    def estimate(self):
        l = self._second_largest_active()
        if l is None:
            return 0.0
        return self.classes[l].estimator.estimate() * self.scale ** (l - 3)

    def estimate_suffix(self, s):
        """Suffix-union query routed to the classes active within the suffix."""
        if s > self.t + 1:
            raise ValueError(f"suffix start {s} is in the future (t={self.t})")
        s = max(int(s), 1)
        active = sorted(l for l, state in self.classes.items()
                        if state.times and state.times[-1] >= s)
        if len(active) < 2:
            return 0.0
        l = active[-2]
        state = self.classes[l]
        # Translate the global suffix start to this class's local clock.
        local_s = bisect.bisect_left(state.times, s) + 1
        return state.estimator.estimate(local_s) * self.scale ** (l - 3)

    # -- introspection ---------------------------------------------------

    def active_classes(self):
        return sorted(self.classes)

    def _second_largest_active(self):
        active = sorted(self.classes)
        if not active:
            return None
        if len(active) < 2:
            raise AssertionError(
                "single active class; every object must activate two")
        return active[-2]
