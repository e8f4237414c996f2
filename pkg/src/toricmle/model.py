"""Design matrices, count data and standard model builders.

A log-linear model is fixed by an integer d x m matrix ``A``; its columns
``a_j`` are the lattice points attached to the m states. Data is a vector of
nonnegative counts ``u`` with sample size ``n = sum(u)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError
from .exact import solve_left


def _as_int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
        raise TypeError(f"{what} must be an integer, got {x!r}")
    return int(x)


@dataclass(frozen=True)
class DesignMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __init__(self, entries: Iterable[Iterable[int]]):
        rows = tuple(tuple(_as_int(x, "matrix entry") for x in row) for row in entries)
        if not rows or not rows[0]:
            raise DimensionError("design matrix needs d >= 1 and m >= 1")
        if any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged design matrix")
        object.__setattr__(self, "entries", rows)

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.d, self.m

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    @cached_property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        return tuple(zip(*self.entries))

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    @cached_property
    def ones_witness(self) -> tuple[Fraction, ...] | None:
        r = solve_left(self.entries, [1] * self.m)
        return None if r is None else tuple(r)

    @property
    def ones_in_rowspan(self) -> bool:
        return self.ones_witness is not None

    def scaled(self, c: int) -> "DesignMatrix":
        return DesignMatrix([[c * x for x in row] for row in self.entries])

    def __repr__(self) -> str:
        return f"DesignMatrix({[list(r) for r in self.entries]})"


@dataclass(frozen=True)
class CountVector:
    counts: tuple[int, ...]

    def __init__(self, counts: Iterable[int]):
        c = tuple(_as_int(x, "count") for x in counts)
        if any(x < 0 for x in c):
            raise ValueError("counts must be nonnegative")
        if sum(c) < 1:
            raise ValueError("sample size must be at least 1")
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def m(self) -> int:
        return len(self.counts)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, x in enumerate(self.counts) if x > 0)

    def empirical(self) -> tuple[Fraction, ...]:
        n = self.n
        return tuple(Fraction(x, n) for x in self.counts)

    def empirical_float(self) -> np.ndarray:
        c = np.array(self.counts, dtype=float)
        return c / c.sum()


@dataclass(frozen=True)
class Linearization:
    """Character ``b`` together with the multiplier applied to ``A``.

    The pair acts by ``v_j -> prod_i lam_i^(scale*a_ij - b_i) v_j``.
    """

    b: tuple[int, ...]
    scale: int = 1

    def __init__(self, b: Iterable[int], scale: int = 1):
        b = tuple(_as_int(x, "linearization entry") for x in b)
        scale = _as_int(scale, "scale")
        if scale < 1:
            raise ValueError("scale must be a positive integer")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "scale", scale)

    @property
    def target(self) -> tuple[Fraction, ...]:
        """``b / scale``: the point tested against polytopes of ``A``."""
        return tuple(Fraction(x, self.scale) for x in self.b)

    def check(self, A: DesignMatrix) -> None:
        if len(self.b) != A.d:
            raise DimensionError(f"linearization has length {len(self.b)}, matrix has d = {A.d}")


def validate_rowspan_ones(A: DesignMatrix) -> tuple[bool, tuple[Fraction, ...] | None]:
    """Exact test of whether the all-ones vector is in the row span of ``A``.

    Returns ``(True, r)`` with ``r^T A = 1`` or ``(False, None)``.
    """
    r = A.ones_witness
    return r is not None, r


def check_counts(A: DesignMatrix, u: CountVector) -> None:
    if u.m != A.m:
        raise DimensionError(f"counts have length {u.m} but the matrix has m = {A.m} columns")


def sufficient_statistics(A: DesignMatrix, u: CountVector | Sequence[int]) -> tuple[int, ...]:
    counts = u.counts if isinstance(u, CountVector) else tuple(_as_int(x, "count") for x in u)
    if len(counts) != A.m:
        raise DimensionError(f"counts have length {len(counts)} but the matrix has m = {A.m} columns")
    return tuple(sum(a * x for a, x in zip(row, counts)) for row in A.entries)


def data_linearization(A: DesignMatrix, u: CountVector) -> Linearization:
    """The action of ``nA`` linearized by ``b = Au``."""
    check_counts(A, u)
    return Linearization(sufficient_statistics(A, u), scale=u.n)


def independence_matrix(m: int) -> DesignMatrix:
    """Independence model of two m-state variables.

    Rows ``0..m-1`` hold the row-marginal indicators, rows ``m..2m-1`` the
    column-marginal ones. State ``(i, j)`` is column ``i*m + j``.
    """
    m = _as_int(m, "m")
    if m < 2:
        raise ValueError("independence model needs m >= 2")
    rows = [[0] * (m * m) for _ in range(2 * m)]
    for i in range(m):
        for j in range(m):
            rows[i][i * m + j] = 1
            rows[m + j][i * m + j] = 1
    return DesignMatrix(rows)


def path_graph_3chain_matrix() -> DesignMatrix:
    """Graphical model of three binary variables on the path 1 - 2 - 3.

    Columns are the states ``p_ijk`` in binary order 000, 001, ..., 111. Rows
    are the marginals ``p_00+, p_01+, p_10+, p_11+, p_+00, p_+01, p_+10, p_+11``.
    """
    rows = [[0] * 8 for _ in range(8)]
    for col in range(8):
        i, j, k = (col >> 2) & 1, (col >> 1) & 1, col & 1
        rows[2 * i + j][col] = 1
        rows[4 + 2 * j + k][col] = 1
    return DesignMatrix(rows)
