"""Stability of vectors under the torus action given by ``(scale*A, b)``.

Stability depends only on the support of a vector and on where ``t = b/scale``
sits relative to ``P_support(A)``:

    unstable     t not in P
    semistable   t in P
    polystable   t in relint P
    stable       t in int P (P full-dimensional in Q^d)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, PreconditionError
from .exact import dot, primitive_integer_vector
from .model import CountVector, DesignMatrix, Linearization, check_counts, data_linearization
from .polytope import (
    CONVEX_COMBINATION,
    LpCertificate,
    SubPolytope,
    _face_and_witness,
    affine_rank,
    contains,
    in_relative_interior,
)


class StabilityClass(enum.Enum):
    UNSTABLE = "Unstable"
    SEMISTABLE_NOT_POLYSTABLE = "SemistableNotPolystable"
    POLYSTABLE_NOT_STABLE = "PolystableNotStable"
    STABLE = "Stable"

    @property
    def semistable(self) -> bool:
        return self is not StabilityClass.UNSTABLE

    @property
    def polystable(self) -> bool:
        return self in (StabilityClass.POLYSTABLE_NOT_STABLE, StabilityClass.STABLE)


class MleSemantics(enum.Enum):
    MLE_EXISTS_UNIQUE = "MleExistsUnique"
    EXTENDED_MLE_ONLY = "ExtendedMleOnly"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class DestabilizingSubgroup:
    """Integer direction sigma with <sigma, scale*a_j - b> > 0 on the support.

    Along ``lam -> (lam^sigma_1, ..., lam^sigma_d)`` every supported
    coordinate is multiplied by a positive power of ``lam``, so the orbit
    reaches 0 as ``lam -> 0``.
    """

    sigma: tuple[int, ...]

    def pairings(self, A: DesignMatrix, lin: Linearization, support: Sequence[int]) -> list[int]:
        return [sum(s * (lin.scale * a - b) for s, a, b in zip(self.sigma, A.column(j), lin.b))
                for j in support]

    def verify(self, A: DesignMatrix, lin: Linearization, support: Sequence[int]) -> bool:
        return len(self.sigma) == A.d and all(p > 0 for p in self.pairings(A, lin, support))

    def to_json(self) -> dict:
        return {"kind": "destabilizing_subgroup", "sigma": list(self.sigma)}


@dataclass(frozen=True)
class StabilityReport:
    stability: StabilityClass
    support: tuple[int, ...]
    certificate: LpCertificate | DestabilizingSubgroup
    mle_semantics: MleSemantics = MleSemantics.NOT_APPLICABLE

    def to_json(self) -> dict:
        return {
            "class": self.stability.value,
            "mle_semantics": self.mle_semantics.value,
            "support": [j + 1 for j in self.support],
            "certificate": self.certificate.to_json(),
        }


def _subgroup_from_functional(cert: LpCertificate, t) -> DestabilizingSubgroup:
    # <sigma, a_j> > offset > <sigma, t> gives <sigma, a_j - t> > 0; clearing
    # denominators is a positive rescaling, which keeps every inequality.
    assert dot(cert.sigma, t) < cert.offset
    return DestabilizingSubgroup(tuple(primitive_integer_vector(cert.sigma)))


def classify(A: DesignMatrix, lin: Linearization, support: Sequence[int]) -> StabilityReport:
    """Hilbert-Mumford classification of any vector with the given support."""
    lin.check(A)
    P = SubPolytope(A, support)
    t = lin.target
    inside, cert = contains(P, t)
    if not inside:
        sub = _subgroup_from_functional(cert, t)
        assert sub.verify(A, lin, P.J)
        return StabilityReport(StabilityClass.UNSTABLE, P.J, sub)
    face, weights = _face_and_witness(P, t)
    if face != P.J:
        return StabilityReport(StabilityClass.SEMISTABLE_NOT_POLYSTABLE, P.J, cert)
    witness = LpCertificate(CONVEX_COMBINATION, P.J, coefficients=weights)
    if affine_rank(A, P.J) == A.d + 1:
        return StabilityReport(StabilityClass.STABLE, P.J, witness)
    return StabilityReport(StabilityClass.POLYSTABLE_NOT_STABLE, P.J, witness)


def classify_ones_for_data(A: DesignMatrix, u: CountVector) -> StabilityReport:
    """Classify the all-ones vector under ``(nA, Au)`` and read off MLE existence."""
    check_counts(A, u)
    if not A.ones_in_rowspan:
        raise PreconditionError("the all-ones vector is not in the row span of A")
    report = classify(A, data_linearization(A, u), range(A.m))
    if report.stability is StabilityClass.UNSTABLE:
        raise RuntimeError("all-ones vector classified unstable although Au/n lies in P(A)")
    if report.stability is StabilityClass.STABLE:
        raise RuntimeError("all-ones vector classified stable although P(A) lies in a hyperplane")
    semantics = (MleSemantics.MLE_EXISTS_UNIQUE if report.stability.polystable
                 else MleSemantics.EXTENDED_MLE_ONLY)
    return StabilityReport(report.stability, report.support, report.certificate, semantics)


def destabilizing_certificate(A: DesignMatrix, lin: Linearization,
                              support: Sequence[int]) -> DestabilizingSubgroup:
    report = classify(A, lin, support)
    if report.stability is not StabilityClass.UNSTABLE:
        raise PreconditionError(
            f"no destabilizing subgroup: the support is {report.stability.value}, not Unstable"
        )
    return report.certificate


def mle_exists_via_semistability(A: DesignMatrix, u: CountVector) -> bool:
    """Existence test through semistability of ``u`` itself.

    The MLE exists iff ``u`` is semistable for ``(nA, b)`` with some
    ``b = Av``, ``v > 0``. The only candidate needed is ``b = Au``: it
    qualifies exactly when ``Au/n`` is a strictly positive convex combination
    of all columns, and it always lies in ``P_u``.
    """
    check_counts(A, u)
    lin = data_linearization(A, u)
    if not in_relative_interior(SubPolytope(A), lin.target):
        return False
    return classify(A, lin, u.support).stability.semistable


def moment_map_residual(A: DesignMatrix, lin: Linearization, q) -> np.ndarray:
    """``scale * A q^(2) / |q|^2 - b``; zero exactly where the moment map vanishes."""
    lin.check(A)
    q = np.asarray(q, dtype=float)
    if q.shape != (A.m,):
        raise DimensionError(f"q has shape {q.shape}, expected ({A.m},)")
    q2 = q * q
    total = q2.sum()
    if total == 0:
        raise ValueError("moment map is undefined at q = 0")
    return lin.scale * (A.to_numpy() @ q2) / total - np.array(lin.b, dtype=float)
