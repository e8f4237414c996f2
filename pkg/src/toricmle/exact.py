"""Exact linear algebra over the rationals.

Matrices are lists of rows. Entries may be ``int`` or ``Fraction``; results
are always ``Fraction`` so callers never see floats from this module.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction

Matrix = list[list[Fraction]]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r} in exact arithmetic")
    # numpy integer scalars
    if hasattr(x, "__index__"):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def frac_vector(v: Iterable) -> list[Fraction]:
    return [as_fraction(x) for x in v]


def frac_matrix(rows: Iterable[Iterable]) -> Matrix:
    return [frac_vector(r) for r in rows]


def transpose(M: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*M)]


def rref(M: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    R = frac_matrix(M)
    if not R:
        return R, []
    nrows, ncols = len(R), len(R[0])
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        piv = next((i for i in range(row, nrows) if R[i][col] != 0), None)
        if piv is None:
            continue
        R[row], R[piv] = R[piv], R[row]
        p = R[row][col]
        R[row] = [x / p for x in R[row]]
        for i in range(nrows):
            if i != row and R[i][col] != 0:
                f = R[i][col]
                R[i] = [a - f * b for a, b in zip(R[i], R[row])]
        pivots.append(col)
        row += 1
    return R, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M or not len(M[0]):
        return 0
    return len(rref(M)[1])


def solve(M: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Some exact solution x of M x = rhs, or None if inconsistent.

    Free variables are set to zero.
    """
    ncols = len(M[0]) if M else 0
    aug = [list(row) + [b] for row, b in zip(M, rhs)]
    R, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        x[col] = R[i][ncols]
    return x


def solve_left(A: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """Exact r with r^T A = target, or None."""
    return solve(transpose(A), target)


def nullspace(M: Sequence[Sequence]) -> Matrix:
    """Basis of {x : M x = 0} (one vector per list entry)."""
    ncols = len(M[0])
    R, pivots = rref(M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, col in enumerate(pivots):
            x[col] = -R[i][f]
        basis.append(x)
    return basis


def matvec(M: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in M]


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def common_denominator(values: Iterable[Fraction]) -> int:
    out = 1
    for x in values:
        out = lcm(out, as_fraction(x).denominator)
    return out


def primitive_integer_vector(v: Sequence[Fraction]) -> list[int]:
    """Clear denominators, then divide by the gcd of the entries."""
    den = common_denominator(v)
    ints = [int(as_fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def integer_determinant(M: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by Bareiss elimination."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def format_fraction(x: Fraction) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
