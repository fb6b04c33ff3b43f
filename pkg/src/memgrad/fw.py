"""Frank-Wolfe solver for the bundle's quadratic dual over the simplex.

Minimizes ``q(lam) = <lam, Q lam> / (2L) - <lam, f_bar>`` over the standard
simplex with the classic 2/(k+2) step size.  The gradient is maintained by a
convex-combination recurrence so one iteration costs O(m) after the initial
O(m^2) matrix-vector product.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SimplexPoint", "FWResult", "objective_value", "objective_gradient",
           "fw_gap", "iteration_budget", "solve"]

# rate constant of the 2/(k+2) schedule on a set of l1-diameter two
RATE_CONSTANT = 18.0

_CURVATURE_TOL = 1e-10


@dataclass
class SimplexPoint:
    """Probability vector: nonnegative entries renormalized to sum to one."""

    lam: np.ndarray

    def __post_init__(self) -> None:
        lam = np.asarray(self.lam, dtype=float)
        if lam.ndim != 1 or lam.size < 1:
            raise ValueError("simplex point must be a nonempty vector")
        if not np.all(np.isfinite(lam)):
            raise ValueError("simplex point must be finite")
        if np.min(lam) < -1e-12:
            raise ValueError("simplex point has a negative entry")
        lam = np.maximum(lam, 0.0)
        total = lam.sum()
        if total <= 0:
            raise ValueError("simplex point must have positive total mass")
        self.lam = lam / total

    @property
    def m(self) -> int:
        return self.lam.size


@dataclass
class FWResult:
    """Outcome of one simplex solve: best iterate, its gap, and counters."""

    lambda_bar: SimplexPoint
    gap: float
    iterations: int
    budget_hit: bool
    gap_history: list[float] | None = field(default=None, repr=False)


def objective_value(Q, f_bar, L: float, lam) -> float:
    """Quadratic dual value <lam, Q lam>/(2L) - <lam, f_bar>."""
    Q, f_bar, lam = _as_inputs(Q, f_bar, lam, L)
    return float(np.dot(lam, Q @ lam) / (2.0 * L) - np.dot(lam, f_bar))


def objective_gradient(Q, f_bar, L: float, lam) -> np.ndarray:
    """Gradient (1/L) Q lam - f_bar."""
    Q, f_bar, lam = _as_inputs(Q, f_bar, lam, L)
    return Q @ lam / L - f_bar


def fw_gap(lam, grad) -> float:
    """Linearized suboptimality <lam, grad> - min_i grad_i; >= 0 on the simplex."""
    lam = np.asarray(lam, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if lam.shape != grad.shape:
        raise ValueError("weights and gradient must have the same shape")
    return float(np.dot(lam, grad) - np.min(grad))


def iteration_budget(Q, L: float, delta: float) -> float:
    """Worst-case iterations to certify a gap of delta: 18 max_i Q_ii / (L delta)."""
    diag_max = float(np.max(np.diagonal(np.asarray(Q, dtype=float))))
    return RATE_CONSTANT * diag_max / (L * delta) if delta > 0 else math.inf


def solve(Q, f_bar, L: float, delta: float, warm_start: SimplexPoint | None = None,
          max_iterations: int | None = None, track_gaps: bool = False) -> FWResult:
    """Run Frank-Wolfe on the quadratic dual until the gap certifies delta.

    Parameters
    ----------
    Q : (m, m) array
        Symmetric positive-semidefinite Gram matrix.
    f_bar : (m,) array
        Linear coefficients (plane values at the proximal center).
    L : float
        Positive scaling of the quadratic term.
    delta : float
        Gap tolerance.  The first iterate (including the start point) whose
        gap is at most delta is returned.  delta = 0 requires an explicit
        ``max_iterations``, since the worst-case budget is infinite.
    warm_start : SimplexPoint, optional
        Starting point; defaults to the uniform vector.
    max_iterations : int, optional
        Hard cap overriding the worst-case budget.
    track_gaps : bool
        Record the gap of every iterate in ``FWResult.gap_history``.

    Returns
    -------
    FWResult
        Best-gap iterate seen, its gap, the number of iterations performed,
        and whether the iteration cap was reached with the gap still above
        delta.
    """
    Q = np.asarray(Q, dtype=float)
    f_bar = np.asarray(f_bar, dtype=float)
    m = f_bar.size
    if Q.shape != (m, m):
        raise ValueError(f"Q must have shape ({m}, {m}), got {Q.shape}")
    if L <= 0:
        raise ValueError("L must be positive")
    if delta < 0:
        raise ValueError("delta must be nonnegative")

    budget = iteration_budget(Q, L, delta)
    if math.isinf(budget):
        if max_iterations is None:
            raise ValueError("delta = 0 requires an explicit max_iterations cap")
        cap = int(max_iterations)
    else:
        cap = max(math.ceil(budget), 1)
        if max_iterations is not None:
            cap = min(cap, int(max_iterations))

    if warm_start is not None:
        if warm_start.m != m:
            raise ValueError(f"warm start has {warm_start.m} entries, expected {m}")
        lam = warm_start.lam.copy()
    else:
        lam = np.full(m, 1.0 / m)

    u = Q @ lam / L - f_bar  # the one O(m^2) product
    if not np.all(np.isfinite(u)):
        raise FloatingPointError("non-finite gradient in the simplex solve "
                                 f"(L={L}, |f_bar|_max={np.max(np.abs(f_bar))})")
    i_min = int(np.argmin(u))
    lam_dot_u = float(np.dot(lam, u))
    gap = lam_dot_u - float(u[i_min])
    best_gap = gap
    best_lam = lam.copy()
    gaps = [gap] if track_gaps else None

    warned = False
    k = 0
    while gap > delta and k < cap:
        # negative curvature along the step direction flags a non-PSD Q
        q_lam_i = L * (u[i_min] + f_bar[i_min])
        lam_q_lam = L * (lam_dot_u + float(np.dot(lam, f_bar)))
        curvature = float(Q[i_min, i_min]) - 2.0 * q_lam_i + lam_q_lam
        if curvature < -_CURVATURE_TOL and not warned:
            warnings.warn("negative curvature encountered: Q is not positive "
                          "semidefinite; continuing anyway", RuntimeWarning,
                          stacklevel=2)
            warned = True

        coeff = k / (k + 2.0)
        step = 2.0 / (k + 2.0)
        lam *= coeff
        lam[i_min] += step
        # the gradient is affine in lam, so it obeys the same recurrence
        u *= coeff
        u += (step / L) * Q[:, i_min]
        u -= step * f_bar
        k += 1

        i_min = int(np.argmin(u))
        lam_dot_u = float(np.dot(lam, u))
        gap = lam_dot_u - float(u[i_min])
        if math.isnan(gap):
            raise FloatingPointError(f"NaN gap in the simplex solve at iteration {k}")
        if track_gaps:
            gaps.append(gap)
        if gap < best_gap:
            best_gap = gap
            best_lam = lam.copy()

    return FWResult(lambda_bar=SimplexPoint(best_lam), gap=best_gap,
                    iterations=k, budget_hit=best_gap > delta, gap_history=gaps)


def _as_inputs(Q, f_bar, lam, L):
    if L <= 0:
        raise ValueError("L must be positive")
    Q = np.asarray(Q, dtype=float)
    f_bar = np.asarray(f_bar, dtype=float)
    lam = lam.lam if isinstance(lam, SimplexPoint) else np.asarray(lam, dtype=float)
    m = f_bar.size
    if Q.shape != (m, m) or lam.shape != (m,):
        raise ValueError("inconsistent shapes for Q, f_bar, and the weights")
    return Q, f_bar, lam
