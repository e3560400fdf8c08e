"""Object oracles: geometric bodies accessed only through size/sample/contains.

Estimators never look inside an object; they see its measure (size), draw
uniform points from it (sample), and test membership (contains).  The object
instance itself is the opaque handle used as a multiset key.  Every backend
also provides vectorised sample_many/contains_many for the columnar hot
paths, and counts its oracle calls in .stats for empirical complexity plots.
"""

import math

import numpy as np

# Membership tolerance for backends that solve a linear system to answer
# contains (simplices, polytopes).  Axis boxes and balls compare exactly.
CONTAINS_ATOL = 1e-9


class OracleStats:
    """Mutable per-object call counters."""

    __slots__ = ("size_calls", "sample_calls", "contains_calls")

    def __init__(self):
        self.size_calls = 0
        self.sample_calls = 0
        self.contains_calls = 0

    def total(self):
        return self.size_calls + self.sample_calls + self.contains_calls


class ObjectOracle:
    """Base class fixing the oracle interface.

    Subclasses must set self._volume at construction (strictly positive;
    zero-volume objects are rejected because a uniform sample from them is
    undefined) and implement _sample_many and _contains_many.
    """

    dim = None

    def __init__(self, volume):
        if not (volume > 0.0 and math.isfinite(volume)):
            raise ValueError(
                f"degenerate object: volume must be positive and finite, got {volume}")
        self._volume = float(volume)
        self.stats = OracleStats()

    def size(self):
        self.stats.size_calls += 1
        return self._volume

    def sample(self, rng):
        self.stats.sample_calls += 1
        return tuple(self._sample_many(1, rng)[0])

    def sample_many(self, count, rng):
        self.stats.sample_calls += count
        if count == 0:
            return np.empty((0, self.dim))
        return self._sample_many(count, rng)

    def contains(self, point):
        self.stats.contains_calls += 1
        return self._contains_one(point)

    def contains_many(self, points):
        points = np.asarray(points, dtype=float)
        if points.size == 0:
            return np.zeros(0, dtype=bool)
        self.stats.contains_calls += len(points)
        return self._contains_many(points)

    def axis_box(self):
        """Analytic axis-aligned bounding box (lo, hi) or None if unknown."""
        return None

    def _sample_many(self, count, rng):
        raise NotImplementedError

    def _contains_many(self, points):
        raise NotImplementedError

    def _contains_one(self, point):
        # single-point membership sits on the estimators' innermost loops;
        # backends override this with plain-float arithmetic
        return bool(self._contains_many(np.asarray(point, dtype=float)[None, :])[0])


class AxisBox(ObjectOracle):
    """Axis-aligned box given by per-axis closed intervals [lo_i, hi_i]."""

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be 1-d arrays of equal length")
        if np.any(hi <= lo):
            raise ValueError("degenerate box: every side must have hi > lo")
        self.lo = lo
        self.hi = hi
        self.dim = len(lo)
        self._bounds = list(zip(lo.tolist(), hi.tolist()))
        super().__init__(float(np.prod(hi - lo)))

    def _sample_many(self, count, rng):
        u = rng.random((count, self.dim))
        return self.lo + u * (self.hi - self.lo)

    def _contains_many(self, points):
        # column-accumulated compares; an (N, d) axis-reduce costs ~3x more
        lo, hi = self.lo, self.hi
        col = points[:, 0]
        out = (col >= lo[0]) & (col <= hi[0])
        for i in range(1, self.dim):
            col = points[:, i]
            out &= col >= lo[i]
            out &= col <= hi[i]
        return out

    def _contains_one(self, point):
        for x, (lo, hi) in zip(point, self._bounds):
            if x < lo or x > hi:
                return False
        return True

    def axis_box(self):
        return self.lo.copy(), self.hi.copy()

    def __repr__(self):
        return f"AxisBox(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


class Simplex(ObjectOracle):
    """d-simplex from d+1 affinely independent vertices."""

    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] != verts.shape[1] + 1:
            raise ValueError("need d+1 vertices of dimension d")
        self.vertices = verts
        self.dim = verts.shape[1]
        edges = (verts[1:] - verts[0]).T  # columns are v_i - v_0
        det = np.linalg.det(edges)
        vol = abs(det) / math.factorial(self.dim)
        if vol <= 0.0 or not math.isfinite(vol) or abs(det) < 1e-300:
            raise ValueError("degenerate simplex: vertices are affinely dependent")
        self._to_bary = np.linalg.inv(edges)
        self._bary_rows = self._to_bary.tolist()
        self._v0 = verts[0].tolist()
        super().__init__(vol)

    def _sample_many(self, count, rng):
        w = rng.dirichlet(np.ones(self.dim + 1), size=count)
        return w @ self.vertices

    def _contains_many(self, points):
        lam = (points - self.vertices[0]) @ self._to_bary.T
        col = lam[:, 0]
        out = col >= -CONTAINS_ATOL
        total = col.copy()
        for i in range(1, self.dim):
            col = lam[:, i]
            out &= col >= -CONTAINS_ATOL
            total += col
        out &= total <= 1.0 + CONTAINS_ATOL
        return out

    def _contains_one(self, point):
        diff = [x - v for x, v in zip(point, self._v0)]
        total = 0.0
        for row in self._bary_rows:
            lam = 0.0
            for r, dx in zip(row, diff):
                lam += r * dx
            if lam < -CONTAINS_ATOL:
                return False
            total += lam
        return total <= 1.0 + CONTAINS_ATOL

    def axis_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def __repr__(self):
        return f"Simplex({self.vertices.tolist()})"


class Ball(ObjectOracle):
    """Euclidean ball."""

    def __init__(self, center, radius):
        center = np.asarray(center, dtype=float)
        if not radius > 0.0:
            raise ValueError("degenerate ball: radius must be positive")
        self.center = center
        self.radius = float(radius)
        self.dim = len(center)
        self._center_list = center.tolist()
        self._r2 = self.radius * self.radius
        d = self.dim
        vol = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * radius ** d
        super().__init__(vol)

    def _sample_many(self, count, rng):
        direction = rng.standard_normal((count, self.dim))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radii = self.radius * rng.random(count) ** (1.0 / self.dim)
        return self.center + direction * radii[:, None]

    def _contains_many(self, points):
        # squared distances so the scalar path agrees bit-for-bit
        diff = points - self.center
        return np.einsum("ij,ij->i", diff, diff) <= self._r2

    def _contains_one(self, point):
        s = 0.0
        for x, c in zip(point, self._center_list):
            dx = x - c
            s += dx * dx
        return s <= self._r2

    def axis_box(self):
        return self.center - self.radius, self.center + self.radius

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


class HalfspacePolytope(ObjectOracle):
    """Bounded convex polytope {x : normals @ x <= offsets}.

    Requires a certified inner ball (center, radius r) with every halfspace
    satisfied at the center with slack >= r, and an enclosing bound R so the
    body lies in [0, R]^d.  d <= 3: the volume comes from an exact vertex
    enumeration, which does not scale past that.
    """

    def __init__(self, normals, offsets, inner_center, inner_radius, outer_bound):
        normals = np.asarray(normals, dtype=float)
        offsets = np.asarray(offsets, dtype=float)
        inner_center = np.asarray(inner_center, dtype=float)
        self.dim = normals.shape[1]
        if self.dim > 3:
            raise ValueError("polytope backend supports d <= 3 only")
        if not inner_radius > 0.0:
            raise ValueError("inner radius must be positive")
        norms = np.linalg.norm(normals, axis=1)
        slack = offsets - normals @ inner_center
        if np.any(slack < inner_radius * norms - 1e-12):
            raise ValueError(
                "inner ball certificate violated: center lacks slack r against a halfspace")
        self.normals = normals
        self.offsets = offsets
        self.inner_center = inner_center
        self.inner_radius = float(inner_radius)
        self.outer_bound = float(outer_bound)

        # Vertex enumeration pins down volume and a tight sampling box.
        from scipy.spatial import ConvexHull, HalfspaceIntersection
        bound_rows = np.vstack([np.eye(self.dim), -np.eye(self.dim)])
        bound_offs = np.concatenate([np.full(self.dim, self.outer_bound),
                                     np.zeros(self.dim)])
        all_normals = np.vstack([normals, bound_rows])
        all_offsets = np.concatenate([offsets, bound_offs])
        hs = HalfspaceIntersection(
            np.hstack([all_normals, -all_offsets[:, None]]), inner_center)
        hull = ConvexHull(hs.intersections)
        self._vertices = hs.intersections
        self._box_lo = self._vertices.min(axis=0)
        self._box_hi = self._vertices.max(axis=0)
        super().__init__(hull.volume)

    def _sample_many(self, count, rng):
        # Rejection from the tight vertex box; acceptance rate is
        # vol / box volume, bounded away from 0 for the certified bodies.
        out = np.empty((count, self.dim))
        have = 0
        span = self._box_hi - self._box_lo
        while have < count:
            batch = max(64, 2 * (count - have))
            pts = self._box_lo + rng.random((batch, self.dim)) * span
            ok = pts[self._contains_many(pts)]
            take = min(len(ok), count - have)
            out[have:have + take] = ok[:take]
            have += take
        return out

    def _contains_many(self, points):
        return np.all(points @ self.normals.T <= self.offsets + CONTAINS_ATOL, axis=1)

    def axis_box(self):
        return self._box_lo.copy(), self._box_hi.copy()

    def vertices(self):
        return self._vertices.copy()

    def __repr__(self):
        return (f"HalfspacePolytope(d={self.dim}, faces={len(self.offsets)}, "
                f"r={self.inner_radius}, R={self.outer_bound})")


class DiscretePointSet(ObjectOracle):
    """Finite point set under counting measure.

    size() is the number of points and sample() is uniform over them, so the
    same estimators that integrate volumes count points instead.  Useful as
    an exactly checkable test double for the continuous backends.
    """

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or len(pts) == 0:
            raise ValueError("need a non-empty (n, d) array of points")
        self.points = pts
        self.dim = pts.shape[1]
        self._index = {tuple(p): True for p in pts.tolist()}
        if len(self._index) != len(pts):
            raise ValueError("points must be distinct")
        super().__init__(float(len(pts)))

    def _sample_many(self, count, rng):
        idx = rng.integers(0, len(self.points), size=count)
        return self.points[idx]

    def _contains_many(self, points):
        idx = self._index
        return np.fromiter((tuple(p) in idx for p in points.tolist()),
                           dtype=bool, count=len(points))

    def axis_box(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def __repr__(self):
        return f"DiscretePointSet(n={len(self.points)}, d={self.dim})"


def total_size(objects):
    """Sum of object measures, through the counted oracle interface."""
    return float(sum(obj.size() for obj in objects))


def coverage_count(objects, points):
    """How many of the given objects contain each point: (len(points),) ints."""
    points = np.asarray(points, dtype=float)
    cov = np.zeros(len(points), dtype=np.int64)
    for obj in objects:
        cov += obj.contains_many(points)
    return cov
