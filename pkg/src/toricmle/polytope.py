"""Exact polyhedral tests on sub-polytopes ``P_J(A) = conv{a_j : j in J}``.

Every test works on a rational target ``t`` (for data this is ``Au/n``).
Replacing ``(A, t)`` by ``(cA, ct)`` never changes an answer, which is how
the integer pair ``(nA, Au)`` maps onto the calls here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .errors import DimensionError, EnumerationLimitError, PreconditionError
from .exact import as_fraction, common_denominator, dot, format_fraction, integer_determinant
from .lp import maximize
from .model import DesignMatrix

DEFAULT_ENUMERATION_LIMIT = 24

CONVEX_COMBINATION = "convex_combination"
SEPARATING_FUNCTIONAL = "separating_functional"


@dataclass(frozen=True)
class SubPolytope:
    A: DesignMatrix
    J: tuple[int, ...]

    def __init__(self, A: DesignMatrix, J: Sequence[int] | None = None):
        idx = tuple(range(A.m)) if J is None else tuple(sorted(set(int(j) for j in J)))
        if not idx:
            raise ValueError("index set must be nonempty")
        if idx[0] < 0 or idx[-1] >= A.m:
            raise IndexError(f"column index out of range for m = {A.m}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "J", idx)

    def points(self) -> list[tuple[int, ...]]:
        return [self.A.column(j) for j in self.J]


@dataclass(frozen=True)
class LpCertificate:
    """Exact witness for a membership answer.

    ``convex_combination``: ``coefficients[k]`` weights column ``J[k]``.
    ``separating_functional``: ``<sigma, a_j> > offset`` for every j in J
    while ``<sigma, t> < offset``.
    """

    kind: str
    J: tuple[int, ...]
    coefficients: tuple[Fraction, ...] | None = None
    sigma: tuple[Fraction, ...] | None = None
    offset: Fraction | None = None

    def verify(self, A: DesignMatrix, t: Sequence) -> bool:
        t = [as_fraction(x) for x in t]
        cols = [A.column(j) for j in self.J]
        if self.kind == CONVEX_COMBINATION:
            v = self.coefficients
            if v is None or len(v) != len(self.J) or any(x < 0 for x in v) or sum(v) != 1:
                return False
            return all(sum((w * c[i] for w, c in zip(v, cols)), Fraction(0)) == t[i]
                       for i in range(A.d))
        if self.kind == SEPARATING_FUNCTIONAL:
            s, c = self.sigma, self.offset
            return dot(s, t) < c and all(dot(s, col) > c for col in cols)
        return False

    def to_json(self) -> dict:
        out = {"kind": self.kind, "indices": [j + 1 for j in self.J]}
        if self.kind == CONVEX_COMBINATION:
            out["coefficients"] = [format_fraction(x) for x in self.coefficients]
        else:
            out["sigma"] = [format_fraction(x) for x in self.sigma]
            out["offset"] = format_fraction(self.offset)
        return out


@dataclass(frozen=True)
class ContainingSet:
    """An inclusion-minimal J with t in P_J(A), with its unique weights."""

    indices: tuple[int, ...]
    weights: tuple[Fraction, ...] = field(compare=False)


def _target(A: DesignMatrix, t: Sequence) -> list[Fraction]:
    t = [as_fraction(x) for x in t]
    if len(t) != A.d:
        raise DimensionError(f"target has length {len(t)}, expected d = {A.d}")
    return t


def _representation_lp(A: DesignMatrix, J: Sequence[int], t: Sequence[Fraction]):
    """Constraint data for {v >= 0 : A_J v = t, sum v = 1}."""
    M = [[A.entries[i][j] for j in J] for i in range(A.d)]
    M.append([1] * len(J))
    return M, list(t) + [Fraction(1)]


def contains(P: SubPolytope, t: Sequence) -> tuple[bool, LpCertificate]:
    """Decide ``t in P_J(A)`` and return an exact certificate either way."""
    A, J = P.A, P.J
    t = _target(A, t)
    M, r = _representation_lp(A, J, t)
    res = maximize(M, r, [0] * len(J))
    if res.feasible:
        return True, LpCertificate(CONVEX_COMBINATION, J, coefficients=res.x)
    # Farkas: y^T [A_J; 1] <= 0 and y^T [t; 1] > 0.  With sigma = -y[:d]:
    # <sigma, a_j> >= y_d > <sigma, t>, so any offset strictly between works.
    y = res.farkas
    sigma = tuple(-yi for yi in y[:-1])
    low = dot(sigma, t)
    offset = (y[-1] + low) / 2
    cert = LpCertificate(SEPARATING_FUNCTIONAL, J, sigma=sigma, offset=offset)
    assert cert.verify(A, t), "Farkas certificate failed re-verification"
    return False, cert


def _face_and_witness(P: SubPolytope, t: Sequence[Fraction]):
    """Minimal face index set plus a combination strictly positive on it."""
    A, J = P.A, P.J
    M, r = _representation_lp(A, J, t)
    k = len(J)
    first = maximize(M, r, [0] * k)
    if not first.feasible:
        raise PreconditionError("target is not in the polytope; it has no minimal face")
    solutions = [first.x]
    positive = {i for i, x in enumerate(first.x) if x > 0}
    for i in range(k):
        if i in positive:
            continue
        obj = [0] * k
        obj[i] = 1
        res = maximize(M, r, obj)
        if res.value > 0:
            solutions.append(res.x)
            positive.update(idx for idx, x in enumerate(res.x) if x > 0)
    weights = tuple(sum(col) / len(solutions) for col in zip(*solutions))
    face = tuple(J[i] for i in sorted(positive))
    return face, weights


def minimal_face(P: SubPolytope, t: Sequence) -> tuple[int, ...]:
    """Indices j in J that carry weight in some representation of ``t``.

    ``conv{a_j : j in F}`` is the smallest face of ``P_J(A)`` containing t.
    """
    return _face_and_witness(P, _target(P.A, t))[0]


def relative_interior_witness(P: SubPolytope, t: Sequence) -> LpCertificate | None:
    """A convex combination positive on all of J, or None if t is not in relint."""
    t = _target(P.A, t)
    ok, _ = contains(P, t)
    if not ok:
        return None
    face, weights = _face_and_witness(P, t)
    if face != P.J:
        return None
    return LpCertificate(CONVEX_COMBINATION, P.J, coefficients=weights)


def in_relative_interior(P: SubPolytope, t: Sequence) -> bool:
    t = _target(P.A, t)
    ok, _ = contains(P, t)
    return ok and minimal_face(P, t) == P.J


def affine_rank(A: DesignMatrix, J: Sequence[int]) -> int:
    """Dimension of the affine hull of ``{a_j : j in J}`` plus one."""
    from .exact import rank

    return rank([[A.entries[i][j] for j in J] for i in range(A.d)] + [[1] * len(J)])


def _check_limit(A: DesignMatrix, limit: int) -> None:
    if A.m > limit:
        raise EnumerationLimitError(
            f"subset enumeration refused: m = {A.m} exceeds the limit of {limit} columns"
        )


def _reduce(x: list[int], piv: int, b: list[int]) -> list[int]:
    f = x[piv]
    if f == 0:
        return x
    p = b[piv]
    y = [p * xi - f * bi for xi, bi in zip(x, b)]
    g = 0
    for v in y:
        g = gcd(g, v)
    return [v // g for v in y] if g > 1 else y


def minimal_containing_subsets(A: DesignMatrix, t: Sequence,
                               limit: int = DEFAULT_ENUMERATION_LIMIT) -> list[ContainingSet]:
    """All inclusion-minimal J with ``t in P_J(A)``.

    A minimal J has affinely independent columns and ``t`` in the relative
    interior of their simplex, i.e. the lifted columns ``(a_j, 1)`` are
    linearly independent and ``(t, 1)`` is a strictly positive combination of
    them. The search walks independent sets in increasing index order and
    stops descending as soon as ``(t, 1)`` enters the span, since any larger
    independent set would then put zero weight on the new columns.
    """
    _check_limit(A, limit)
    t = _target(A, t)
    den = common_denominator(t)
    r0 = [int(x * den) for x in t] + [den]
    lifted = [list(col) + [1] for col in A.columns]
    found: list[ContainingSet] = []

    def descend(start: int, basis: list[tuple[int, list[int]]], r: list[int], J: list[int]):
        for k in range(start, A.m):
            x = lifted[k]
            for piv, b in basis:
                x = _reduce(x, piv, b)
            piv = next((i for i, v in enumerate(x) if v != 0), None)
            if piv is None:
                continue
            r2 = _reduce(r, piv, x)
            J2 = J + [k]
            if any(r2):
                descend(k + 1, basis + [(piv, x)], r2, J2)
                continue
            w = _cramer([p for p, _ in basis] + [piv], J2)
            if all(x > 0 for x in w):
                found.append(ContainingSet(tuple(J2), tuple(x / den for x in w)))

    def _cramer(rows: list[int], J: list[int]) -> list[Fraction]:
        # the lifted columns of J restricted to the pivot rows form a
        # nonsingular square system with the same solution as the full one
        M = [[lifted[j][i] for j in J] for i in rows]
        rhs = [r0[i] for i in rows]
        det = integer_determinant(M)
        out = []
        for c in range(len(J)):
            Mc = [row[:c] + [b] + row[c + 1:] for row, b in zip(M, rhs)]
            out.append(Fraction(integer_determinant(Mc), det))
        return out

    descend(0, [], r0, [])
    found.sort(key=lambda s: s.indices)
    return found


def _masks(sets: Sequence[Sequence[int]]) -> list[int]:
    return [sum(1 << j for j in s) for s in sets]


def _containing_table(m: int, minimal_masks: Sequence[int]) -> np.ndarray:
    """Boolean table over all 2^m subsets: does the subset contain t?"""
    table = np.zeros(1 << m, dtype=bool)
    table[list(minimal_masks)] = True
    for i in range(m):
        view = table.reshape(-1, 2, 1 << i)
        view[:, 1, :] |= view[:, 0, :]
    return table


def _mask_to_indices(mask: int, m: int) -> tuple[int, ...]:
    return tuple(j for j in range(m) if mask >> j & 1)


def maximal_excluding_subsets(A: DesignMatrix, t: Sequence,
                              limit: int = DEFAULT_ENUMERATION_LIMIT,
                              minimal: Sequence[ContainingSet] | None = None) -> list[tuple[int, ...]]:
    """All inclusion-maximal J with ``t not in P_J(A)``.

    Membership is upward closed, so ``t in P_S`` exactly when S contains one
    of the minimal containing sets. The answer is read off the closure of
    that family over the subset lattice. The empty set is never reported: it
    is maximal only when every column equals t. ``minimal`` may pass in an
    already computed family of minimal containing sets.
    """
    _check_limit(A, limit)
    mins = minimal_containing_subsets(A, t, limit) if minimal is None else minimal
    m = A.m
    if not mins:
        return [tuple(range(m))]
    cont = _containing_table(m, _masks([s.indices for s in mins]))
    ok = ~cont
    for i in range(m):
        ok.reshape(-1, 2, 1 << i)[:, 0, :] &= cont.reshape(-1, 2, 1 << i)[:, 1, :]
    ok[0] = False
    out = [_mask_to_indices(int(s), m) for s in np.flatnonzero(ok)]
    out.sort()
    return out
