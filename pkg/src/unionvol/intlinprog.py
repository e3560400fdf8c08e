"""Exact integer linear programming over rationals.

Small dense problems only: the grid filter needs to enumerate lattice points
of low-dimensional polytopes intersected with a hash congruence, and the
answer must be exact (no tolerance tuning), so everything here runs on
Fraction arithmetic.  Two-phase primal simplex with Bland's rule underneath,
branch and bound with interval propagation on top, and a lexicographic
enumerator that lists every feasible integer point.

All variables must carry finite bounds; that keeps the LP relaxations compact
and the enumeration finite.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

_ZERO = Fraction(0)
_ONE = Fraction(1)
_PROPAGATE_ROUNDS = 50


def as_fraction(x):
    """Exact Fraction from int/float/Fraction (floats convert exactly)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _frac_rows(rows):
    return [[as_fraction(v) for v in row] for row in rows]


def _frac_vec(vec):
    return [as_fraction(v) for v in vec]


# ---------------------------------------------------------------------------
# simplex


def _pivot(tab, basis, r, c):
    piv = tab[r][c]
    inv = _ONE / piv
    tab[r] = [v * inv for v in tab[r]]
    row_r = tab[r]
    for i, row in enumerate(tab):
        if i == r:
            continue
        f = row[c]
        if f != 0:
            tab[i] = [v - f * w for v, w in zip(row, row_r)]
    basis[r] = c


def _simplex(tab, basis, obj, ncols):
    """Bland-rule simplex on an m x (ncols+1) tableau in canonical form.

    obj is the reduced-cost row (length ncols+1, rhs slot holds -value).
    Mutates everything in place; returns "optimal" or "unbounded".
    """
    m = len(tab)
    while True:
        enter = -1
        for j in range(ncols):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i in range(m):
            coef = tab[i][enter]
            if coef > 0:
                ratio = tab[i][-1] / coef
                if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(tab, basis, leave, enter)
        f = obj[enter]
        if f != 0:
            row = tab[leave]
            for j in range(ncols + 1):
                obj[j] -= f * row[j]


def lp_solve(c, a_ub, b_ub, a_eq=None, b_eq=None):
    """min c.x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0.

    Exact rational two-phase simplex.  Returns (status, value, x) with
    status one of "optimal", "infeasible", "unbounded"; x is a list of
    Fractions on success.
    """
    a_eq = a_eq or []
    b_eq = b_eq or []
    c = _frac_vec(c)
    a_ub = _frac_rows(a_ub)
    b_ub = _frac_vec(b_ub)
    a_eq = _frac_rows(a_eq)
    b_eq = _frac_vec(b_eq)
    n = len(c)
    m1, m2 = len(a_ub), len(a_eq)
    m = m1 + m2

    nslack = m1
    # artificial columns are assigned after we know which rows need them
    rows = []
    needs_art = []
    for i in range(m1):
        row = list(a_ub[i]) + [_ZERO] * nslack
        row[n + i] = _ONE
        rhs = b_ub[i]
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
            needs_art.append(True)  # slack coefficient is now -1
        else:
            needs_art.append(False)
        rows.append((row, rhs))
    for i in range(m2):
        row = list(a_eq[i]) + [_ZERO] * nslack
        rhs = b_eq[i]
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        needs_art.append(True)
        rows.append((row, rhs))

    nart = sum(needs_art)
    ncols = n + nslack + nart
    tab = []
    basis = []
    art_cols = []
    next_art = n + nslack
    for i, (row, rhs) in enumerate(rows):
        full = row + [_ZERO] * nart + [rhs]
        if needs_art[i]:
            full[next_art] = _ONE
            basis.append(next_art)
            art_cols.append(next_art)
            next_art += 1
        else:
            basis.append(n + i)
        tab.append(full)

    if nart:
        obj1 = [_ZERO] * (ncols + 1)
        for col in art_cols:
            obj1[col] = _ONE
        for i, b in enumerate(basis):
            if b in art_cols:
                row = tab[i]
                for j in range(ncols + 1):
                    obj1[j] -= row[j]
        status = _simplex(tab, basis, obj1, ncols)
        assert status == "optimal"  # phase 1 is always bounded below by 0
        if -obj1[-1] > 0:
            return "infeasible", None, None
        # drive leftover zero-value artificials out of the basis
        art_set = set(art_cols)
        for i in range(m):
            if basis[i] in art_set:
                for j in range(n + nslack):
                    if tab[i][j] != 0:
                        _pivot(tab, basis, i, j)
                        break
        keep = [i for i in range(m) if basis[i] not in art_set]
        tab = [tab[i][:n + nslack] + [tab[i][-1]] for i in keep]
        basis = [basis[i] for i in keep]
        ncols = n + nslack
        m = len(tab)

    obj2 = [ci for ci in c] + [_ZERO] * (ncols - n) + [_ZERO]
    for i, b in enumerate(basis):
        f = obj2[b]
        if f != 0:
            row = tab[i]
            for j in range(ncols + 1):
                obj2[j] -= f * row[j]
    status = _simplex(tab, basis, obj2, ncols)
    if status == "unbounded":
        return "unbounded", None, None
    x = [_ZERO] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tab[i][-1]
    value = sum(ci * xi for ci, xi in zip(c, x))
    return "optimal", value, x


# ---------------------------------------------------------------------------
# integer programs


@dataclass
class IlpResult:
    status: str  # "optimal" or "infeasible"
    value: Optional[Fraction] = None
    x: Optional[tuple] = None


def _ceil(f):
    return -((-f.numerator) // f.denominator)


def _floor(f):
    return f.numerator // f.denominator


def _propagate(a_ub, b_ub, lo, hi):
    """Interval propagation over <= rows with integral variables.

    lo/hi are integer lists, tightened in place to a fixpoint (or until the
    round cap).  Returns False iff some domain empties.
    """
    n = len(lo)
    for _ in range(_PROPAGATE_ROUNDS):
        changed = False
        for row, rhs in zip(a_ub, b_ub):
            mins = []
            for j in range(n):
                a = row[j]
                if a > 0:
                    mins.append(a * lo[j])
                elif a < 0:
                    mins.append(a * hi[j])
                else:
                    mins.append(_ZERO)
            total_min = sum(mins)
            if total_min > rhs:
                return False
            for j in range(n):
                a = row[j]
                if a == 0:
                    continue
                slack = rhs - (total_min - mins[j])
                if a > 0:
                    new_hi = _floor(slack / a)
                    if new_hi < hi[j]:
                        hi[j] = new_hi
                        changed = True
                else:
                    new_lo = _ceil(slack / a)
                    if new_lo > lo[j]:
                        lo[j] = new_lo
                        changed = True
                if lo[j] > hi[j]:
                    return False
        if not changed:
            return True
    return True


def _rows_with_bounds(a_ub, b_ub, a_eq, b_eq):
    """Fold equalities into <= rows (both directions)."""
    rows = [list(r) for r in a_ub]
    rhs = list(b_ub)
    for row, b in zip(a_eq, b_eq):
        rows.append(list(row))
        rhs.append(b)
        rows.append([-v for v in row])
        rhs.append(-b)
    return rows, rhs


def _point_feasible(rows, rhs, x):
    return all(sum(a * v for a, v in zip(row, x)) <= b
               for row, b in zip(rows, rhs))


def _lp_with_bounds(c, rows, rhs, lo, hi):
    """LP relaxation in shifted variables u = x - lo >= 0."""
    n = len(lo)
    a_ub = []
    b_ub = []
    for row, b in zip(rows, rhs):
        a_ub.append(row)
        b_ub.append(b - sum(a * l for a, l in zip(row, lo)))
    for j in range(n):
        bound = [_ZERO] * n
        bound[j] = _ONE
        a_ub.append(bound)
        b_ub.append(Fraction(hi[j] - lo[j]))
    status, value, u = lp_solve(c, a_ub, b_ub)
    if status != "optimal":
        return status, None, None
    x = [ui + li for ui, li in zip(u, lo)]
    value = value + sum(ci * li for ci, li in zip(c, lo))
    return status, value, x


def ilp_min(c, a_ub, b_ub, a_eq, b_eq, lo, hi):
    """min c.x over integer points of {a_ub x <= b_ub, a_eq x = b_eq,
    lo <= x <= hi}.  Exact branch and bound; bounds must be finite."""
    c = _frac_vec(c)
    rows, rhs = _rows_with_bounds(_frac_rows(a_ub), _frac_vec(b_ub),
                                  _frac_rows(a_eq), _frac_vec(b_eq))
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    if any(l > h for l, h in zip(lo, hi)):
        return IlpResult("infeasible")
    integral_obj = all(ci.denominator == 1 for ci in c)

    best_val = None
    best_x = None
    stack = [(list(lo), list(hi))]
    while stack:
        nlo, nhi = stack.pop()
        nlo_f = [Fraction(v) for v in nlo]
        nhi_f = [Fraction(v) for v in nhi]
        if not _propagate(rows, rhs, nlo_f, nhi_f):
            continue
        nlo = [_ceil(v) for v in nlo_f]
        nhi = [_floor(v) for v in nhi_f]
        if any(l > h for l, h in zip(nlo, nhi)):
            continue
        if nlo == nhi:
            x = nlo
            if _point_feasible(rows, rhs, x):
                val = sum(ci * xi for ci, xi in zip(c, x))
                if best_val is None or val < best_val:
                    best_val, best_x = val, tuple(x)
            continue
        status, val, x = _lp_with_bounds(c, rows, rhs, nlo, nhi)
        if status == "infeasible":
            continue
        if status == "unbounded":
            raise ValueError("relaxation unbounded despite finite bounds")
        if best_val is not None:
            cutoff = _ceil(val) if integral_obj else val
            if cutoff >= best_val:
                continue
        frac_j = -1
        frac_dist = _ZERO
        for j, xj in enumerate(x):
            dist = min(xj - _floor(xj), _ceil(xj) - xj)
            if dist > frac_dist:
                frac_dist = dist
                frac_j = j
        if frac_j < 0:
            xi = [_floor(v) for v in x]
            val_i = sum(ci * vi for ci, vi in zip(c, xi))
            if best_val is None or val_i < best_val:
                best_val, best_x = val_i, tuple(xi)
            continue
        split = _floor(x[frac_j])
        left_hi = list(nhi)
        left_hi[frac_j] = min(left_hi[frac_j], split)
        right_lo = list(nlo)
        right_lo[frac_j] = max(right_lo[frac_j], split + 1)
        stack.append((right_lo, list(nhi)))
        stack.append((list(nlo), left_hi))
    if best_val is None:
        return IlpResult("infeasible")
    return IlpResult("optimal", best_val, best_x)


def ilp_list(a_ub, b_ub, a_eq, b_eq, lo, hi):
    """Every integer point of the polytope, in lexicographic order.

    Repeatedly minimises the first unfixed coordinate, recursing on each
    attainable value.  The number of solver calls is proportional to the
    number of distinct solution prefixes, so sparse answers come back fast
    even when the bounding box is large.
    """
    a_ub = _frac_rows(a_ub)
    b_ub = _frac_vec(b_ub)
    a_eq = _frac_rows(a_eq)
    b_eq = _frac_vec(b_eq)
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    n = len(lo)
    out = []

    def descend(prefix):
        k = len(prefix)
        if k == n:
            out.append(tuple(prefix))
            return
        c = [_ZERO] * n
        c[k] = _ONE
        cur = lo[k]
        while cur <= hi[k]:
            sub_lo = prefix + [cur] + lo[k + 1:]
            sub_hi = prefix + [hi[k]] + hi[k + 1:]
            res = ilp_min(c, a_ub, b_ub, a_eq, b_eq, sub_lo, sub_hi)
            if res.status != "optimal":
                return
            v = int(res.value)
            descend(prefix + [v])
            cur = v + 1

    descend([])
    return out
