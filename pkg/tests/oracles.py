"""Slow, independent reference implementations used only by the tests.

None of these touch the package's own linear algebra or simplex code:
membership goes through scipy's LP solver or through brute-force
Caratheodory enumeration with sympy's exact rational matrices.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import sympy
from scipy.optimize import linprog


def _representation(columns, t):
    A_eq = np.array([[float(c[i]) for c in columns] for i in range(len(t))] + [[1.0] * len(columns)])
    b_eq = np.array([float(x) for x in t] + [1.0])
    return A_eq, b_eq


def lp_contains(columns, t) -> bool:
    """t in conv(columns) by a floating-point HiGHS LP.

    Data here are small integers and rationals with small denominators, so
    the solver's feasibility tolerance cannot blur a genuine answer.
    """
    if not columns:
        return False
    A_eq, b_eq = _representation(columns, t)
    res = linprog(np.zeros(len(columns)), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.status == 0


def simplex_weights(columns, t):
    """Barycentric weights of t w.r.t. affinely independent columns, or None."""
    M = sympy.Matrix([[int(c[i]) for c in columns] for i in range(len(t))] + [[1] * len(columns)])
    if M.rank() < len(columns):
        return None
    rhs = sympy.Matrix([sympy.Rational(x) for x in t] + [1])
    try:
        sol, params = M.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.shape[0]:
        return None
    return [Fraction(int(x.p), int(x.q)) for x in sol]


def containing_simplices(A_cols, t) -> list[frozenset]:
    """All affinely independent index sets whose simplex contains t (weights >= 0)."""
    d = len(t)
    out = []
    for k in range(1, min(d + 1, len(A_cols)) + 1):
        for T in combinations(range(len(A_cols)), k):
            w = simplex_weights([A_cols[j] for j in T], t)
            if w is not None and all(x >= 0 for x in w):
                out.append(frozenset(T))
    return out


def subset_scan(A_cols, t):
    """Exhaustive scan of all 2^m subsets.

    Returns (minimal containing sets, maximal excluding sets) as sorted lists
    of sorted tuples. Membership uses Caratheodory: t in P_S iff some
    containing simplex lies inside S.
    """
    m = len(A_cols)
    simplices = [sum(1 << j for j in T) for T in containing_simplices(A_cols, t)]
    member = [any(s & S == s for s in simplices) for S in range(1 << m)]
    mins, maxs = [], []
    for S in range(1, 1 << m):
        bits = [j for j in range(m) if S >> j & 1]
        if member[S]:
            if all(not member[S & ~(1 << j)] for j in bits):
                mins.append(tuple(bits))
        else:
            if all(member[S | (1 << j)] for j in range(m) if not S >> j & 1):
                maxs.append(tuple(bits))
    return sorted(mins), sorted(maxs)


def in_triangle_hull_2d(points, t) -> bool:
    """2-d hull membership by checking every triangle, segment and point."""
    t = [Fraction(x) for x in t]
    pts = [tuple(Fraction(x) for x in p) for p in points]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    for p in pts:
        if p == tuple(t):
            return True
    for a, b in combinations(pts, 2):
        if cross(a, b, t) == 0 and min(a[0], b[0]) <= t[0] <= max(a[0], b[0]) \
                and min(a[1], b[1]) <= t[1] <= max(a[1], b[1]):
            return True
    for a, b, c in combinations(pts, 3):
        s1, s2, s3 = cross(a, b, t), cross(b, c, t), cross(c, a, t)
        if (s1 >= 0 and s2 >= 0 and s3 >= 0) or (s1 <= 0 and s2 <= 0 and s3 <= 0):
            if cross(a, b, c) != 0:
                return True
    return False


def face_by_lp(A_cols, t) -> tuple[int, ...]:
    """Indices carrying positive weight in some representation (one LP each)."""
    A_eq, b_eq = _representation(A_cols, t)
    out = []
    for j in range(len(A_cols)):
        c = np.zeros(len(A_cols))
        c[j] = -1.0
        res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if res.status == 0 and -res.fun > 1e-9:
            out.append(j)
    return tuple(out)


def log_sum_exp_gradient_fd(Ap: np.ndarray, y: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central differences of f(y) = sum_j exp<y, a'_j>."""
    f = lambda z: float(np.sum(np.exp(z @ Ap)))
    g = np.zeros_like(y)
    for i in range(len(y)):
        e = np.zeros_like(y)
        e[i] = h
        g[i] = (f(y + e) - f(y - e)) / (2 * h)
    return g


def independence_closed_form(table: np.ndarray) -> np.ndarray:
    n = table.sum()
    return np.outer(table.sum(1), table.sum(0)).ravel() / n**2
