"""Enclosing shapes for convex bodies known only through an oracle.

Two layers:

* :func:`min_enclosing_ellipsoid` - Khachiyan's barycentric ascent on a finite
  point set, post-scaled so every input point is strictly inside.
* :func:`bounding_box` - a rotated box certified (with high probability) to
  contain a convex body, built by sampling the body, wrapping the sample in an
  ellipsoid, and dilating.  For shapes with known geometry (axis boxes, balls,
  simplices) exact overrides skip the sampling entirely.

The rotated box doubles as a halfspace system so downstream integer programs
can intersect it with grid constraints.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AxisBox, Ball, Simplex

_KHACHIYAN_TOL = 0.01
_KHACHIYAN_MAX_ITERS = 20000


@dataclass
class Ellipsoid:
    """{x : (x-c)^T A (x-c) <= 1} with A symmetric positive definite."""

    center: np.ndarray
    shape: np.ndarray  # A

    def contains(self, x, slack=1e-9):
        diff = np.asarray(x, dtype=float) - self.center
        return float(diff @ self.shape @ diff) <= 1.0 + slack

    def dilate(self, factor):
        """Scale semi-axes by factor about the center."""
        return Ellipsoid(self.center.copy(), self.shape / factor ** 2)


def min_enclosing_ellipsoid(points, tol=_KHACHIYAN_TOL):
    """Near-minimal ellipsoid containing every row of points.

    Khachiyan's algorithm with multiplicative weight updates; the (1 + tol)
    dilation at the end turns the approximate Loewner ellipsoid into a
    certified cover.  Degenerate (affinely dependent) inputs are handled by
    regularising the scatter matrix.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("points must be a nonempty 2-d array")
    n, d = pts.shape
    if n == 1:
        return Ellipsoid(pts[0].copy(), np.eye(d) * 1e12)

    q = np.hstack([pts, np.ones((n, 1))]).T  # (d+1) x n lifted points
    u = np.full(n, 1.0 / n)
    for _ in range(_KHACHIYAN_MAX_ITERS):
        x = (q * u) @ q.T
        try:
            inv = np.linalg.inv(x)
        except np.linalg.LinAlgError:
            inv = np.linalg.inv(x + 1e-12 * np.eye(d + 1))
        m = np.einsum("ij,jk,ik->i", q.T, inv, q.T)
        j = int(np.argmax(m))
        maximum = m[j]
        step = (maximum - d - 1.0) / ((d + 1.0) * (maximum - 1.0))
        if step <= 0 or maximum <= d + 1 + tol * (d + 1):
            break
        u = u * (1.0 - step)
        u[j] += step

    center = pts.T @ u
    scatter = (pts.T * u) @ pts - np.outer(center, center)
    try:
        a = np.linalg.inv(scatter) / d
    except np.linalg.LinAlgError:
        a = np.linalg.inv(scatter + 1e-12 * np.eye(d)) / d

    # Exact cover: scale so the farthest input sits on the boundary, then pad.
    diffs = pts - center
    radii = np.einsum("ij,jk,ik->i", diffs, a, diffs)
    worst = float(radii.max())
    if worst > 0:
        a = a / worst
    a = a / (1.0 + tol) ** 2
    return Ellipsoid(center, a)


@dataclass
class RotatedBox:
    """Box with orthonormal axes: {c + sum_i t_i u_i : |t_i| <= h_i}."""

    center: np.ndarray
    axes: np.ndarray  # rows are unit vectors u_i
    half: np.ndarray  # h_i > 0

    @property
    def volume(self):
        return float(np.prod(2.0 * self.half))

    def contains(self, x, slack=1e-9):
        t = self.axes @ (np.asarray(x, dtype=float) - self.center)
        return bool(np.all(np.abs(t) <= self.half + slack))

    def contains_many(self, pts):
        t = (np.asarray(pts, dtype=float) - self.center) @ self.axes.T
        return np.all(np.abs(t) <= self.half + 1e-9, axis=1)

    def halfspaces(self):
        """(normals, offsets) with the box = {x : normals @ x <= offsets}."""
        normals = np.vstack([self.axes, -self.axes])
        offsets = np.concatenate([
            self.axes @ self.center + self.half,
            -(self.axes @ self.center) + self.half,
        ])
        return normals, offsets

    def corner_bounds(self):
        """Axis-aligned lo/hi of the rotated box."""
        reach = np.abs(self.axes.T) @ self.half
        return self.center - reach, self.center + reach


def ellipsoid_to_box(ell):
    """Smallest rotated box containing the ellipsoid (axes = principal axes)."""
    vals, vecs = np.linalg.eigh(ell.shape)
    vals = np.maximum(vals, 1e-18)
    half = 1.0 / np.sqrt(vals)
    return RotatedBox(center=ell.center.copy(), axes=vecs.T.copy(), half=half)


def _sample_count(d, n, mode):
    """Points to draw before wrapping.  The conservative mode follows the
    (6d^2)^d * (d + 2 ln n) schedule; the calibrated mode is the empirical
    budget that already certifies containment at the dilation used here."""
    if mode == "paper":
        return int(math.ceil((6.0 * d * d) ** d * (d + 2.0 * math.log(n))))
    if mode == "calibrated":
        return int(math.ceil(64 * d * d * (d + 2.0 * math.log(max(n, 2)))))
    raise ValueError(f"unknown sampling mode {mode!r}")


def bounding_box(obj, n, rng, mode="calibrated", dilation=None):
    """RotatedBox containing obj with probability >= 1 - 1/poly(n).

    Exact for axis boxes, balls, and simplices.  Otherwise draws
    _sample_count points, wraps them in a minimum enclosing ellipsoid, and
    dilates by 6 d^2 (the worst-case sandwiching factor for convex bodies)
    before converting to a box.
    """
    exact = _exact_box(obj)
    if exact is not None:
        return exact

    d = obj.dim
    k = _sample_count(d, n, mode)
    pts = obj.sample_many(k, rng)
    ell = min_enclosing_ellipsoid(pts)
    factor = dilation if dilation is not None else 6.0 * d * d
    return ellipsoid_to_box(ell.dilate(factor))


def _exact_box(obj):
    if isinstance(obj, AxisBox):
        center = (obj.lo + obj.hi) / 2.0
        return RotatedBox(center=center, axes=np.eye(obj.dim),
                          half=(obj.hi - obj.lo) / 2.0)
    if isinstance(obj, Ball):
        return RotatedBox(center=obj.center.copy(), axes=np.eye(obj.dim),
                          half=np.full(obj.dim, obj.radius))
    if isinstance(obj, Simplex):
        lo = obj.vertices.min(axis=0)
        hi = obj.vertices.max(axis=0)
        half = np.maximum((hi - lo) / 2.0, 1e-12)
        return RotatedBox(center=(lo + hi) / 2.0, axes=np.eye(obj.dim),
                          half=half)
    box = obj.axis_box()
    if box is not None:
        lo, hi = box
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        half = np.maximum((hi - lo) / 2.0, 1e-12)
        return RotatedBox(center=(lo + hi) / 2.0, axes=np.eye(len(lo)),
                          half=half)
    return None
