"""Null cone of the torus action ``(scale*A, b)``.

The null cone is a union of coordinate subspaces ``<e_j : j in J>``; its
irreducible components come from the maximal J with ``t not in P_J(A)``.
Set-theoretically it is cut out by the square-free monomials over the
minimal J with ``t in P_J(A)``; raising their variables to the integer
weights of ``t`` as a convex combination makes them invariant.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CrossCheckError, PreconditionError
from .exact import as_fraction, primitive_integer_vector
from .model import CountVector, DesignMatrix, Linearization, check_counts, data_linearization
from .polytope import (
    DEFAULT_ENUMERATION_LIMIT,
    SubPolytope,
    maximal_excluding_subsets,
    minimal_containing_subsets,
    minimal_face,
)


@dataclass(frozen=True)
class MonomialInvariant:
    exponents: tuple[int, ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, r in enumerate(self.exponents) if r > 0)

    def weight(self, A: DesignMatrix, lin: Linearization) -> tuple[int, ...]:
        """``sum_j r_j (scale*a_j - b)``; zero for an invariant."""
        return tuple(
            sum(r * (lin.scale * A.entries[i][j] - lin.b[i]) for j, r in enumerate(self.exponents))
            for i in range(A.d)
        )

    def satisfies_identity(self, A: DesignMatrix, lin: Linearization) -> bool:
        return all(w == 0 for w in self.weight(A, lin))

    def evaluate(self, x: Sequence) -> Fraction:
        out = Fraction(1)
        for j, r in enumerate(self.exponents):
            if r:
                out *= as_fraction(x[j]) ** r
        return out

    def __str__(self) -> str:
        parts = []
        for j, r in enumerate(self.exponents):
            if r == 1:
                parts.append(f"x{j + 1}")
            elif r > 1:
                parts.append(f"x{j + 1}^{r}")
        return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class NullConeDescription:
    components: tuple[tuple[int, ...], ...]
    generators: tuple[MonomialInvariant, ...]
    component_intersection: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "components": [[j + 1 for j in c] for c in self.components],
            "generators": [list(g.exponents) for g in self.generators],
            "monomials": [str(g) for g in self.generators],
            "component_intersection": [j + 1 for j in self.component_intersection],
        }


def null_cone(A: DesignMatrix, lin: Linearization,
              limit: int = DEFAULT_ENUMERATION_LIMIT) -> NullConeDescription:
    lin.check(A)
    t = lin.target
    generators = []
    minimal = minimal_containing_subsets(A, t, limit)
    for s in minimal:
        r = primitive_integer_vector(s.weights)
        exps = [0] * A.m
        for j, e in zip(s.indices, r):
            exps[j] = e
        inv = MonomialInvariant(tuple(exps))
        assert inv.satisfies_identity(A, lin)
        generators.append(inv)
    components = maximal_excluding_subsets(A, t, limit, minimal)
    if components:
        common = set(components[0]).intersection(*components[1:])
    else:
        common = set()
    return NullConeDescription(tuple(components), tuple(generators), tuple(sorted(common)))


def mle_exists_via_components(A: DesignMatrix, u: CountVector,
                              limit: int = DEFAULT_ENUMERATION_LIMIT) -> tuple[bool, tuple[int, ...]]:
    """MLE existence from the intersection of the null-cone components.

    Returns ``(exists, intersection)``. The intersection is cross-checked
    against the columns outside the minimal face of ``P(A)`` containing
    ``Au/n``.
    """
    check_counts(A, u)
    lin = data_linearization(A, u)
    desc = null_cone(A, lin, limit)
    face = minimal_face(SubPolytope(A), lin.target)
    outside = tuple(j for j in range(A.m) if j not in face)
    if outside != desc.component_intersection:
        raise CrossCheckError(
            "component intersection disagrees with the minimal face",
            {"intersection": desc.component_intersection, "outside_face": outside},
        )
    return not desc.component_intersection, desc.component_intersection


def is_in_null_cone(desc: NullConeDescription, v: Sequence) -> bool:
    """True iff every generator vanishes at v."""
    nonzero = {j for j, x in enumerate(v) if x != 0}
    return all(not set(g.support) <= nonzero for g in desc.generators)


def act(A: DesignMatrix, lin: Linearization, lam: Sequence, x: Sequence) -> list[Fraction]:
    """``x_j -> prod_i lam_i^(scale*a_ij - b_i) x_j`` in exact arithmetic."""
    lam = [as_fraction(l) for l in lam]
    if any(l == 0 for l in lam):
        raise PreconditionError("torus elements must have nonzero entries")
    out = []
    for j in range(A.m):
        f = as_fraction(x[j])
        for i in range(A.d):
            f *= lam[i] ** (lin.scale * A.entries[i][j] - lin.b[i])
        out.append(f)
    return out


def verify_invariance(inv: MonomialInvariant, A: DesignMatrix, lin: Linearization,
                      lam: Sequence, x: Sequence | None = None, seed: int = 0) -> bool:
    """Exact check that the monomial takes the same value at x and lam . x."""
    if x is None:
        rng = random.Random(seed)
        x = [Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)) for _ in range(A.m)]
    return inv.evaluate(x) == inv.evaluate(act(A, lin, lam, x))
