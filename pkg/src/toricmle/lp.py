"""Exact two-phase simplex on equality-form LPs.

Solves  max c.x  s.t.  M x = r,  x >= 0  with integer (fraction-free)
pivoting: the tableau is stored as integers ``T`` over a common positive
denominator ``D`` and every update is an exact Bareiss division. Bland's rule
picks entering and leaving variables, so the method terminates on degenerate
problems.

When the problem is infeasible the phase-one duals are returned as a Farkas
certificate ``y`` with ``y^T M <= 0`` and ``y^T r > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .exact import as_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    farkas: tuple[Fraction, ...] | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class _Tableau:
    """Integer tableau ``T / D``; last column is the right-hand side."""

    def __init__(self, rows: list[list[int]], obj: list[int], basis: list[int]):
        self.T = rows
        self.z = obj
        self.D = 1
        self.basis = basis

    def pivot(self, r: int, s: int) -> None:
        T, D = self.T, self.D
        prow = T[r]
        P = prow[s]
        for i, row in enumerate(T):
            if i == r:
                continue
            f = row[s]
            if f == 0:
                self.T[i] = [(a * P) // D for a in row]
            else:
                self.T[i] = [(a * P - f * b) // D for a, b in zip(row, prow)]
        f = self.z[s]
        self.z = [(a * P - f * b) // D for a, b in zip(self.z, prow)]
        self.D = P
        self.basis[r] = s
        if self.D < 0:
            self.T = [[-a for a in row] for row in self.T]
            self.z = [-a for a in self.z]
            self.D = -self.D

    def run(self, allowed: Sequence[bool]) -> str:
        """Minimise the objective row with Bland's rule."""
        rhs = len(self.z) - 1
        while True:
            s = next((j for j in range(rhs) if allowed[j] and self.z[j] < 0), None)
            if s is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.T):
                a = row[s]
                if a <= 0:
                    continue
                if best is None:
                    best = i
                    continue
                # compare row[rhs]/a with T[best][rhs]/T[best][s]
                lhs = row[rhs] * self.T[best][s]
                cur = self.T[best][rhs] * a
                if lhs < cur or (lhs == cur and self.basis[i] < self.basis[best]):
                    best = i
            if best is None:
                return UNBOUNDED
            self.pivot(best, s)


def _integer_rows(M, r) -> tuple[list[list[int]], list[int], list[Fraction]]:
    rows, rhs, scales = [], [], []
    for row, b in zip(M, r):
        row = [as_fraction(a) for a in row]
        b = as_fraction(b)
        s = lcm(*(a.denominator for a in row), b.denominator)
        if b < 0:
            s = -s
        rows.append([int(a * s) for a in row])
        rhs.append(int(b * s))
        scales.append(Fraction(s))
    return rows, rhs, scales


def maximize(M: Sequence[Sequence], r: Sequence, c: Sequence) -> LpResult:
    """Maximise ``c.x`` over ``{x >= 0 : M x = r}`` exactly."""
    k = len(M)
    n = len(c)
    rows, rhs, scales = _integer_rows(M, r)
    width = n + k
    T = []
    for i in range(k):
        art = [0] * k
        art[i] = 1
        T.append(rows[i] + art + [rhs[i]])
    # phase one: minimise the sum of artificials
    z = [-sum(rows[i][j] for i in range(k)) for j in range(n)] + [0] * k + [-sum(rhs)]
    tab = _Tableau(T, z, list(range(n, n + k)))
    tab.run([True] * width)

    D = tab.D
    if tab.z[-1] != 0:
        y = [1 - Fraction(tab.z[n + i], D) for i in range(k)]
        return LpResult(INFEASIBLE, farkas=tuple(yi * s for yi, s in zip(y, scales)))

    # drive zero-level artificials out of the basis where possible
    for i in range(k):
        if tab.basis[i] >= n:
            s = next((j for j in range(n) if tab.T[i][j] != 0), None)
            if s is not None:
                tab.pivot(i, s)

    cf = [as_fraction(x) for x in c]
    cscale = lcm(*(x.denominator for x in cf)) if cf else 1
    cost = [-int(x * cscale) for x in cf] + [0] * k  # minimise -c
    D = tab.D
    z = []
    for j in range(width + 1):
        base = cost[j] * D if j < width else 0
        z.append(base - sum(cost[tab.basis[i]] * tab.T[i][j] for i in range(k)))
    tab.z = z
    status = tab.run([True] * n + [False] * k)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED)
    D = tab.D
    x = [Fraction(0)] * n
    for i, b in enumerate(tab.basis):
        if b < n:
            x[b] = Fraction(tab.T[i][-1], D)
    value = sum((ci * xi for ci, xi in zip(cf, x)), Fraction(0))
    return LpResult(OPTIMAL, x=tuple(x), value=value)


def feasible_point(M: Sequence[Sequence], r: Sequence) -> LpResult:
    return maximize(M, r, [0] * (len(M[0]) if M else 0))
