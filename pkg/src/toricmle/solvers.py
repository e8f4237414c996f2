"""Numerical routes to the (extended) maximum likelihood estimate.

Two independent methods:

* Iterative proportional scaling on a nonnegative, equal-column-sum matrix
  with the same row span as ``A``.
* Capacity minimisation: minimise ``f(y) = sum_j exp<y, a'_j>`` with
  ``a'_j = n a_j - Au``. Only ``|lambda_i|`` enters the squared norm of a
  complex torus orbit, so the real substitution ``y_i = log|lambda_i|^2``
  covers the whole complex problem. At a minimiser the estimate is the
  normalised vector ``exp<y, a'_j>``, i.e. ``|q_j|^2 / |q|^2`` for
  ``q_j = exp(<y, a'_j>/2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CrossCheckError, NotConvergedError, PreconditionError
from .exact import rank
from .model import CountVector, DesignMatrix, check_counts, sufficient_statistics

ZERO_THRESHOLD = 1e-9


@dataclass(frozen=True)
class IpsConfig:
    tolerance: float = 1e-10
    max_iterations: int = 100_000
    alpha_override: Fraction | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.alpha_override is not None and Fraction(self.alpha_override) <= 0:
            raise ValueError("alpha_override must be positive")


@dataclass(frozen=True)
class CapacityConfig:
    tolerance: float = 1e-10
    max_iterations: int = 100_000
    backtrack: float = 0.5
    sufficient_decrease: float = 1e-4
    y_ceiling: float = 1e3
    extrapolate_every: int = 25

    def __post_init__(self):
        for name in ("tolerance", "backtrack", "sufficient_decrease", "y_ceiling"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class TraceRecord:
    k: int
    residual: float
    sum: float
    sqnorm: float
    kl_to_reference: float | None = None
    objective: float | None = None

    def to_json(self) -> dict:
        out = {"k": self.k, "residual": self.residual, "sum": self.sum, "sqnorm": self.sqnorm}
        if self.kl_to_reference is not None:
            out["kl_to_reference"] = self.kl_to_reference
        if self.objective is not None:
            out["objective"] = self.objective
        return out


@dataclass
class MleResult:
    estimate: np.ndarray
    is_extended: bool
    method: str
    iterations: int
    birch_residual: float
    converged: bool = True
    trace: list[TraceRecord] = field(default_factory=list, repr=False)
    y: np.ndarray | None = None
    capacity: float | None = None
    guard_tripped: bool = False
    checks: dict = field(default_factory=dict)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(j) for j in np.flatnonzero(self.estimate > 0))


@dataclass(frozen=True)
class Preprocessing:
    shift: int
    alpha: int
    appended_row: bool

    @property
    def identity(self) -> bool:
        return self.shift == 0 and not self.appended_row


def kl_divergence(p, q) -> float:
    """``sum p_j log(p_j / q_j)`` with ``0 log(0/q) = 0``; +inf off the support of q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def write_trace(records: Sequence[TraceRecord], path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")


def _require_ones(A: DesignMatrix) -> None:
    if not A.ones_in_rowspan:
        raise PreconditionError("the all-ones vector is not in the row span of A")


def ips_preprocess(A: DesignMatrix) -> tuple[DesignMatrix, Preprocessing]:
    """Nonnegative matrix with equal column sums and the same row span as A."""
    _require_ones(A)
    entries = A.entries
    sums = [sum(col) for col in A.columns]
    low = min(min(row) for row in entries)
    if low >= 0 and len(set(sums)) == 1:
        return A, Preprocessing(0, sums[0], False)
    shift = max(0, 1 - low)
    base = rank(entries)
    while True:
        shifted = [[x + shift for x in row] for row in entries]
        # adding multiples of the all-ones row never leaves the row span,
        # so equal rank means equal span
        if rank(shifted) == base:
            break
        shift += 1
    sums = [sum(col) for col in zip(*shifted)]
    alpha = max(sums)
    extra = [alpha - s for s in sums]
    if any(extra):
        return DesignMatrix(shifted + [extra]), Preprocessing(shift, alpha, True)
    return DesignMatrix(shifted), Preprocessing(shift, alpha, False)


def _birch_residual(A: np.ndarray, p: np.ndarray, ubar: np.ndarray) -> float:
    return float(np.max(np.abs(A @ p - A @ ubar)))


def _finish_estimate(p: np.ndarray) -> tuple[np.ndarray, bool]:
    """Normalise, zero out sub-threshold entries, report whether any were zeroed."""
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    small = p < ZERO_THRESHOLD
    if small.any():
        p = np.where(small, 0.0, p)
        p = p / p.sum()
    return p, bool(small.any())


def ips_iterates(A: DesignMatrix, u: CountVector, alpha_override=None):
    """Yield the raw IPS iterates ``p^(0) = 1/m, p^(1), ...`` without end.

    Each step is ``p_j <- p_j * prod_i (s_i / (A~p)_i)^(a~_ij / alpha)`` on
    the preprocessed matrix, with the factor ``0^0`` taken as 1.
    """
    check_counts(A, u)
    At_int, prep = ips_preprocess(A)
    At = At_int.to_numpy()
    alpha = float(Fraction(alpha_override)) if alpha_override is not None else float(prep.alpha)
    E = At / alpha
    target = At @ u.empirical_float()
    zero_target = target == 0
    p = np.full(A.m, 1.0 / A.m)
    while True:
        yield p
        stats = At @ p
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = target / stats
        ratio[zero_target & (stats == 0)] = 1.0
        if np.all(ratio > 0):
            p = p * np.exp(E.T @ np.log(ratio))
        else:
            p = p * np.prod(ratio[:, None] ** E, axis=0)


def ips_solve(A: DesignMatrix, u: CountVector, cfg: IpsConfig | None = None,
              reference=None) -> MleResult:
    """Iterative proportional scaling started at the uniform distribution.

    ``reference`` (typically a previously computed estimate) adds
    ``KL(reference || p_k)`` to every trace record. The returned estimate is
    normalised and thresholded; the raw iterates are available from
    :func:`ips_iterates`.
    """
    cfg = cfg or IpsConfig()
    check_counts(A, u)
    At, _ = ips_preprocess(A)
    At = At.to_numpy()
    ubar = u.empirical_float()
    target = At @ ubar
    ref = None if reference is None else np.asarray(reference, dtype=float)

    trace: list[TraceRecord] = []
    best_p, best_res = None, math.inf
    converged = False
    for k, p in enumerate(ips_iterates(A, u, cfg.alpha_override)):
        res = float(np.max(np.abs(At @ p - target)))
        trace.append(TraceRecord(
            k, res, float(p.sum()), float(math.fsum(p * p)),
            None if ref is None else kl_divergence(ref, p),
        ))
        if res < best_res:
            best_p, best_res = p, res
        if res <= cfg.tolerance:
            converged = True
            break
        if k >= cfg.max_iterations or not np.all(np.isfinite(p)):
            break

    p = p if converged else best_p
    estimate, extended = _finish_estimate(p)
    return MleResult(
        estimate=estimate,
        is_extended=extended,
        method="ips",
        iterations=k,
        birch_residual=_birch_residual(A.to_numpy(), estimate, ubar),
        converged=converged,
        trace=trace,
    )


def capacity_matrix(A: DesignMatrix, u: CountVector) -> np.ndarray:
    """Columns ``a'_j = n a_j - Au`` as a float d x m array."""
    b = np.array(sufficient_statistics(A, u), dtype=float)
    return u.n * A.to_numpy() - b[:, None]


def capacity_objective(Ap: np.ndarray, y) -> float:
    """``f(y) = sum_j exp<y, a'_j>``."""
    return float(np.sum(np.exp(np.asarray(y, dtype=float) @ Ap)))


def capacity_gradient(Ap: np.ndarray, y) -> np.ndarray:
    w = np.exp(np.asarray(y, dtype=float) @ Ap)
    return Ap @ w


def estimate_from_y(Ap: np.ndarray, y) -> np.ndarray:
    z = np.asarray(y, dtype=float) @ Ap
    w = np.exp(z - z.max())
    return w / w.sum()


def _log_ratio(p: np.ndarray, z: np.ndarray, s: float) -> float:
    """``log f(y + s d) - log f(y)`` given ``p = p(y)`` and ``z = d @ A'``."""
    return math.log1p(float(np.sum(p * np.expm1(np.minimum(s * z, 700.0)))))


def _extrapolate(Ap: np.ndarray, y: np.ndarray, p: np.ndarray, direction: np.ndarray,
                 ceiling: float):
    """Doubling line search along a secant direction.

    Used when descent has slowed down: the iterate is then drifting along a
    direction in which the objective keeps decreasing without bound (the
    estimate is approaching the boundary of the simplex). Returns the new
    point and the change in ``log f``, or None if no step helps.
    """
    z = direction @ Ap
    best = None
    s = 1.0
    while float(np.max(np.abs(y + s * direction))) <= ceiling:
        dl = _log_ratio(p, z, s)
        if best is not None and dl >= best[1]:
            break
        if dl < 0:
            best = (s, dl)
        elif best is None:
            return None
        s *= 2.0
    if best is None:
        return None
    return y + best[0] * direction, best[1]


def capacity_solve(A: DesignMatrix, u: CountVector, cfg: CapacityConfig | None = None) -> MleResult:
    """Gradient descent with backtracking on ``log f``.

    ``grad log f = grad f / f = A' p(y)``, the rescaled moment-map residual,
    so the stopping rule is ``|A' p|_inf <= tolerance``. Trial steps come
    from the Barzilai-Borwein formula and are halved until the Armijo
    condition holds. The decrease ``log f(y + s d) - log f(y)`` is evaluated
    as ``log1p(sum_j p_j expm1(s <d, a'_j>))`` so it stays accurate near the
    optimum.
    """
    cfg = cfg or CapacityConfig()
    _require_ones(A)
    check_counts(A, u)
    Ap = capacity_matrix(A, u)
    d, m = Ap.shape
    ubar = u.empirical_float()

    y = np.zeros(d)
    p = estimate_from_y(Ap, y)
    log_f = math.log(m)
    grad = Ap @ p
    step = 1.0 / max(1.0, float(np.max(np.sum(Ap * Ap, axis=0))))
    trace: list[TraceRecord] = []
    converged = guard = False
    anchor = None
    k = 0
    while True:
        gnorm = float(np.max(np.abs(grad)))
        trace.append(TraceRecord(k, gnorm, float(p.sum()), float(math.fsum(p * p)), objective=log_f))
        if gnorm <= cfg.tolerance:
            converged = True
            break
        if float(np.max(np.abs(y))) > cfg.y_ceiling:
            guard = True
            break
        if k >= cfg.max_iterations:
            break
        direction = -grad
        z = direction @ Ap
        slope = float(grad @ direction)
        s = step
        while True:
            dlog = _log_ratio(p, z, s)
            if dlog <= cfg.sufficient_decrease * s * slope:
                break
            s *= cfg.backtrack
            if s < 1e-300:
                break
        if s < 1e-300:
            # no representable decrease along the gradient: numerically stationary
            break
        y_new = y + s * direction
        p_new = estimate_from_y(Ap, y_new)
        grad_new = Ap @ p_new
        sy = y_new - y
        gy = grad_new - grad
        curv = float(sy @ gy)
        step = float(sy @ sy) / curv if curv > 0 else 2.0 * s
        y, p, grad = y_new, p_new, grad_new
        log_f += dlog
        k += 1
        if k % cfg.extrapolate_every == 0:
            gnorm_new = float(np.max(np.abs(grad)))
            if anchor is not None and gnorm_new > 0.5 * anchor[1]:
                jump = _extrapolate(Ap, y, p, y - anchor[0], 2.0 * cfg.y_ceiling)
                if jump is not None:
                    y, dl = jump
                    p = estimate_from_y(Ap, y)
                    grad = Ap @ p
                    log_f += dl
            anchor = (y.copy(), float(np.max(np.abs(grad))))

    if not (converged or guard):
        raise NotConvergedError(
            f"capacity minimisation stopped after {k} iterations with gradient {gnorm:.3e}"
        )
    estimate, extended = _finish_estimate(p)
    z = y @ Ap
    zmax = float(z.max())
    cap = math.exp(zmax) * float(np.sum(np.exp(z - zmax)))
    return MleResult(
        estimate=estimate,
        is_extended=extended or guard,
        method="capacity",
        iterations=k,
        birch_residual=_birch_residual(A.to_numpy(), estimate, ubar),
        converged=converged,
        trace=trace,
        y=y,
        capacity=cap,
        guard_tripped=guard,
    )


AGREEMENT_TOLERANCE = 1e-6
BIRCH_TOLERANCE = 1e-8


def _exact_face(A: DesignMatrix, u: CountVector) -> tuple[str, tuple[int, ...]]:
    from .polytope import SubPolytope, minimal_face
    from .stability import classify_ones_for_data

    report = classify_ones_for_data(A, u)
    face = minimal_face(SubPolytope(A), [Fraction(x, u.n) for x in sufficient_statistics(A, u)])
    return report.mle_semantics.value, face


def _restrict(A: DesignMatrix, u: CountVector, face: Sequence[int]) -> tuple[DesignMatrix, CountVector]:
    return (DesignMatrix([[row[j] for j in face] for row in A.entries]),
            CountVector([u.counts[j] for j in face]))


def _embed(A: DesignMatrix, u: CountVector, res: MleResult, face: Sequence[int]) -> MleResult:
    """Lift a face-restricted result back to all m states with exact zeros."""
    p = np.zeros(A.m)
    p[list(face)] = res.estimate
    res.estimate = p
    res.is_extended = True
    res.birch_residual = _birch_residual(A.to_numpy(), p, u.empirical_float())
    return res


def _run(A: DesignMatrix, u: CountVector, method: str, ips_config, capacity_config,
         reference) -> MleResult:
    if method == "ips":
        return ips_solve(A, u, ips_config, reference)
    return capacity_solve(A, u, capacity_config)


def mle(A: DesignMatrix, u: CountVector, method: str = "both",
        ips_config: IpsConfig | None = None,
        capacity_config: CapacityConfig | None = None,
        reference=None) -> MleResult | tuple[MleResult, MleResult]:
    """Dispatch to one solver, or run both and reconcile them.

    The exact classification runs first. When only an extended MLE exists,
    the solvers work on the columns of the minimal face (where the
    restricted MLE is interior and both methods converge linearly) and the
    estimate is padded with exact zeros; its Birch residual is measured
    against the full matrix. Every result carries ``checks`` comparing its
    extended flag and support with the exact answer.

    With ``method="both"`` the pair ``(ips, capacity)`` is returned after
    checking agreement and both Birch residuals; any failure raises
    CrossCheckError carrying both results.
    """
    _require_ones(A)
    check_counts(A, u)
    if method not in ("ips", "capacity", "both"):
        raise ValueError(f"unknown method {method!r}")
    semantics, face = _exact_face(A, u)
    extended = len(face) < A.m
    if extended:
        A_run, u_run = _restrict(A, u, face)
        ref = None if reference is None else np.asarray(reference, dtype=float)[list(face)]
    else:
        A_run, u_run, ref = A, u, reference

    def solve(name: str) -> MleResult:
        res = _run(A_run, u_run, name, ips_config, capacity_config, ref)
        if extended:
            res = _embed(A, u, res, face)
        res.checks = {
            "mle_semantics": semantics,
            "face": face,
            "restricted_to_face": extended,
            "extended_agrees": res.is_extended == extended,
            "support_agrees": res.support == face,
        }
        return res

    if method != "both":
        return solve(method)
    ips = solve("ips")
    cap = solve("capacity")
    gap = float(np.max(np.abs(ips.estimate - cap.estimate)))
    problems = []
    if gap > AGREEMENT_TOLERANCE:
        problems.append(f"estimates differ by {gap:.3e}")
    for res in (ips, cap):
        if res.birch_residual > BIRCH_TOLERANCE:
            problems.append(f"{res.method} Birch residual {res.birch_residual:.3e}")
        if not res.checks["extended_agrees"]:
            problems.append(f"{res.method} extended flag disagrees with exact classification")
        if not res.checks["support_agrees"]:
            problems.append(f"{res.method} support disagrees with the exact minimal face")
    details = {"ips": ips, "capacity": cap, "gap": gap}
    if problems:
        raise CrossCheckError("solver cross-check failed: " + "; ".join(problems), details)
    ips.checks["gap"] = cap.checks["gap"] = gap
    return ips, cap
