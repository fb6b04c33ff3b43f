"""Outer optimization loops built on the plane memory and the simplex solver.

Three drivers are provided: ``adaptive_run`` (doubling line search on the
step constant), ``fixed_run`` (user-supplied constant), and
``gradient_descent_run`` (the memoryless baseline, same line search).  All
share the oracle convention that one call returns the pair (value, gradient),
and all record per-iteration history for reporting and certificate checks.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fw
from .bundle import CYCLIC, STRATEGIES, Bundle, make_entry
from .geometry import EuclideanGeometry

__all__ = ["ADAPTIVE", "FIXED", "SolverConfig", "IterationRecord", "SolverState",
           "gradient_step", "memory_step", "accept_test", "adaptive_run",
           "fixed_run", "gradient_descent_run", "rate_certificate",
           "strong_convexity_certificate"]

ADAPTIVE = "adaptive"
FIXED = "fixed"

# 2^60 growth on top of l0 before giving up; guards against a broken oracle
MAX_DOUBLINGS = 60

# Fraction of the warm-start mass seeded on the newest plane after an insert.
# A pure carry-over lets the inner solver exit at zero iterations forever
# (the old weights stay gap-certified), freezing the dual weights and stalling
# the outer method near the residual target; blending in the incoming plane
# forces a re-certification against the freshest gradient.
WARM_MIX = 0.1

Oracle = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass
class SolverConfig:
    """Knobs for one solver run."""

    bundle_capacity: int = 1
    strategy: str = CYCLIC
    delta: float = 5e-7
    epsilon: float = 1e-6
    l0: float = 1.0
    variant: str = ADAPTIVE
    max_outer_iterations: int = 200_000
    warm_start: bool = True
    literal_linesearch: bool = False
    record_iterates: bool = False
    max_fw_iterations: int | None = None

    def __post_init__(self) -> None:
        if self.bundle_capacity < 1:
            raise ValueError("bundle_capacity must be at least 1")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.delta == 0 and self.max_fw_iterations is None:
            raise ValueError("delta = 0 requires max_fw_iterations")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.l0 <= 0:
            raise ValueError("l0 must be positive")
        if self.variant not in (ADAPTIVE, FIXED):
            raise ValueError(f"variant must be {ADAPTIVE!r} or {FIXED!r}")
        if self.max_outer_iterations < 0:
            raise ValueError("max_outer_iterations must be nonnegative")


@dataclass
class IterationRecord:
    """Counters for one completed outer iteration (index is 1-based)."""

    index: int
    f_value: float
    l_trial: float
    doublings: int
    fw_iterations: int
    gap: float
    elapsed_s: float


@dataclass
class SolverState:
    """Mutable run state: current iterate, constant estimate, and counters."""

    x: np.ndarray
    L: float
    bundle: Bundle | None
    oracle_calls: int = 0
    fw_steps_total: int = 0
    fw_budget_hits: int = 0
    outer_iters: int = 0
    converged: bool = False
    residual: float | None = None
    history: list[IterationRecord] = field(default_factory=list)
    iterates: list[np.ndarray] | None = None


def gradient_step(geom: EuclideanGeometry, oracle: Oracle, x, L: float) -> np.ndarray:
    """One plain gradient step x - (1/L) B^{-1} grad f(x)."""
    x = np.asarray(x, dtype=float)
    _, g = oracle(x)
    return x - geom.conjugate_argmax(g, L)


def memory_step(geom: EuclideanGeometry, bundle: Bundle, x_bar, L: float,
                delta: float, warm_start: fw.SimplexPoint | None = None,
                max_fw_iterations: int | None = None
                ) -> tuple[np.ndarray, fw.FWResult]:
    """One inexact step using the full plane memory.

    Solves the quadratic dual over the simplex to tolerance delta and maps the
    weights back to the primal trial point
    ``x_plus = x_bar - (1/L) B^{-1} G lam``.  The bundle must hold the base
    point as its current entry.
    """
    x_bar = np.asarray(x_bar, dtype=float)
    if not np.array_equal(bundle._z[bundle.current_index], x_bar):
        raise ValueError("bundle must contain the base point as its current entry")
    f_bar = bundle.plane_values(x_bar)
    res = fw.solve(bundle.gram, f_bar, L, delta, warm_start=warm_start,
                   max_iterations=max_fw_iterations)
    x_plus = x_bar - geom.conjugate_argmax(bundle.gradient_combination(res.lambda_bar.lam), L)
    return x_plus, res


def accept_test(bundle: Bundle, x_bar, x_plus, f_plus: float, l_trial: float) -> bool:
    """Model-based acceptance: f(x_plus) <= model(x_plus) + L * beta(x_bar, x_plus)."""
    rhs = bundle.model_value(x_plus) + l_trial * bundle.geom.bregman_distance(x_bar, x_plus)
    return f_plus <= rhs


def adaptive_run(config: SolverConfig, problem, geom: EuclideanGeometry | None = None,
                 observer: Callable[[IterationRecord], None] | None = None,
                 stop_when: Callable[[SolverState], bool] | None = None) -> SolverState:
    """Run the memory method with a doubling line search on the step constant.

    Each outer iteration finds the smallest i >= 0 such that the trial point
    computed with constant 2^i * L_k passes ``accept_test``, then sets
    L_{k+1} = 2^{i-1} * L_k.  The acceptance inequality uses the trial
    constant on the right-hand side unless ``config.literal_linesearch`` asks
    for the un-doubled L_k.  The dual solve is warm started from trial to
    trial and across outer iterations (mass at an evicted slot transfers to
    the entry replacing it).

    Stops when the residual against ``problem.f_opt`` drops to
    ``config.epsilon`` (when f_opt is known), when ``stop_when`` fires, or at
    the iteration cap.
    """
    geom = geom or EuclideanGeometry(np.asarray(problem.x0).size)
    t0 = time.perf_counter()
    x = np.asarray(problem.x0, dtype=float).copy()
    f, g = problem.evaluate(x)
    bundle = Bundle(geom, config.bundle_capacity, config.strategy,
                    make_entry(geom, x, f, g))
    state = SolverState(x=x, L=config.l0, bundle=bundle, oracle_calls=1)
    if config.record_iterates:
        state.iterates = [x.copy()]
    f_opt = getattr(problem, "f_opt", None)
    if _stopped_at_start(state, f, f_opt, config.epsilon):
        return state

    L = config.l0
    warm: fw.SimplexPoint | None = None
    for k in range(config.max_outer_iterations):
        f_bar = bundle.plane_values(x)
        gram = bundle.gram
        fw_this = 0
        accepted = False
        trial_warm = warm if config.warm_start else None
        for i in range(MAX_DOUBLINGS + 1):
            l_trial = L * (2.0 ** i)
            res = fw.solve(gram, f_bar, l_trial, config.delta, warm_start=trial_warm,
                           max_iterations=config.max_fw_iterations)
            fw_this += res.iterations
            if res.budget_hit:
                state.fw_budget_hits += 1
            if config.warm_start:
                trial_warm = res.lambda_bar
            x_plus = x - geom.conjugate_argmax(
                bundle.gradient_combination(res.lambda_bar.lam), l_trial)
            f_plus, g_plus = problem.evaluate(x_plus)
            state.oracle_calls += 1
            if not math.isfinite(f_plus):
                raise RuntimeError(f"non-finite objective value at outer iteration "
                                   f"{k}, doubling {i}")
            l_rhs = L if config.literal_linesearch else l_trial
            if accept_test(bundle, x, x_plus, f_plus, l_rhs):
                accepted = True
                break
        if not accepted:
            raise RuntimeError(f"line search exceeded {MAX_DOUBLINGS} doublings; "
                               "the step constant overflowed")

        size_before = bundle.size
        slot = bundle.insert(make_entry(geom, x_plus, f_plus, g_plus))
        if config.warm_start:
            warm = _remap_warm(res.lambda_bar.lam, slot, bundle.size > size_before)
        x = x_plus
        f = f_plus
        L = 0.5 * l_trial
        _finish_iteration(state, config, x, f, L, k, l_trial, i, fw_this, res.gap,
                          t0, f_opt, observer)
        if state.converged or (stop_when is not None and stop_when(state)):
            break
    return state


def fixed_run(config: SolverConfig, problem, geom: EuclideanGeometry | None = None,
              observer: Callable[[IterationRecord], None] | None = None,
              stop_when: Callable[[SolverState], bool] | None = None) -> SolverState:
    """Run the memory method with the constant fixed at ``config.l0``.

    No acceptance test is performed, so the constant must be a valid upper
    bound for the objective's curvature for the convergence certificates to
    hold.  One oracle call per iteration (for the new bundle entry).
    """
    geom = geom or EuclideanGeometry(np.asarray(problem.x0).size)
    t0 = time.perf_counter()
    x = np.asarray(problem.x0, dtype=float).copy()
    f, g = problem.evaluate(x)
    bundle = Bundle(geom, config.bundle_capacity, config.strategy,
                    make_entry(geom, x, f, g))
    state = SolverState(x=x, L=config.l0, bundle=bundle, oracle_calls=1)
    if config.record_iterates:
        state.iterates = [x.copy()]
    f_opt = getattr(problem, "f_opt", None)
    if _stopped_at_start(state, f, f_opt, config.epsilon):
        return state

    L = config.l0
    warm: fw.SimplexPoint | None = None
    for k in range(config.max_outer_iterations):
        x_plus, res = memory_step(geom, bundle, x, L, config.delta,
                                  warm_start=warm if config.warm_start else None,
                                  max_fw_iterations=config.max_fw_iterations)
        if res.budget_hit:
            state.fw_budget_hits += 1
        f_plus, g_plus = problem.evaluate(x_plus)
        state.oracle_calls += 1
        if not math.isfinite(f_plus):
            raise RuntimeError(f"non-finite objective value at outer iteration {k}")
        size_before = bundle.size
        bundle.insert(make_entry(geom, x_plus, f_plus, g_plus))
        if config.warm_start:
            lam = res.lambda_bar.lam
            if bundle.size > size_before:
                lam = np.append(lam, 0.0)
            warm = fw.SimplexPoint(lam)
        x = x_plus
        f = f_plus
        _finish_iteration(state, config, x, f, L, k, L, 0, res.iterations, res.gap,
                          t0, f_opt, observer)
        if state.converged or (stop_when is not None and stop_when(state)):
            break
    return state


def gradient_descent_run(config: SolverConfig, problem,
                         geom: EuclideanGeometry | None = None,
                         observer: Callable[[IterationRecord], None] | None = None,
                         stop_when: Callable[[SolverState], bool] | None = None
                         ) -> SolverState:
    """Memoryless baseline: plain gradient steps with the same line search.

    Keeps only the latest linearization, so with a capacity-one bundle the
    memory drivers must reproduce these iterates exactly.  Implemented
    independently of the bundle machinery to serve as a cross-check.
    """
    geom = geom or EuclideanGeometry(np.asarray(problem.x0).size)
    t0 = time.perf_counter()
    x = np.asarray(problem.x0, dtype=float).copy()
    f, g = problem.evaluate(x)
    state = SolverState(x=x, L=config.l0, bundle=None, oracle_calls=1)
    if config.record_iterates:
        state.iterates = [x.copy()]
    f_opt = getattr(problem, "f_opt", None)
    if _stopped_at_start(state, f, f_opt, config.epsilon):
        return state

    L = config.l0
    adaptive = config.variant == ADAPTIVE
    for k in range(config.max_outer_iterations):
        if adaptive:
            f_star = float(np.dot(g, x)) - f  # offset of the single plane
            accepted = False
            for i in range(MAX_DOUBLINGS + 1):
                l_trial = L * (2.0 ** i)
                x_plus = x - geom.conjugate_argmax(g, l_trial)
                f_plus, g_plus = problem.evaluate(x_plus)
                state.oracle_calls += 1
                if not math.isfinite(f_plus):
                    raise RuntimeError(f"non-finite objective value at outer "
                                       f"iteration {k}, doubling {i}")
                plane = float(np.dot(g, x_plus)) - f_star
                l_rhs = L if config.literal_linesearch else l_trial
                if f_plus <= plane + l_rhs * geom.bregman_distance(x, x_plus):
                    accepted = True
                    break
            if not accepted:
                raise RuntimeError(f"line search exceeded {MAX_DOUBLINGS} doublings; "
                                   "the step constant overflowed")
            doublings = i
            L_next = 0.5 * l_trial
        else:
            l_trial = L
            x_plus = x - geom.conjugate_argmax(g, L)
            f_plus, g_plus = problem.evaluate(x_plus)
            state.oracle_calls += 1
            if not math.isfinite(f_plus):
                raise RuntimeError(f"non-finite objective value at outer iteration {k}")
            doublings = 0
            L_next = L
        x = x_plus
        f = f_plus
        g = g_plus
        L = L_next
        _finish_iteration(state, config, x, f, L, k, l_trial, doublings, 0, 0.0,
                          t0, f_opt, observer)
        if state.converged or (stop_when is not None and stop_when(state)):
            break
    return state


def rate_certificate(history: list[IterationRecord], geom: EuclideanGeometry,
                     x0, y, f_y: float, L: float, delta: float,
                     tol: float = 1e-9) -> bool:
    """Check the ergodic bound for every prefix of a run.

    For each T, the running mean of the recorded objective values must not
    exceed ``f_y + L * beta(x0, y) / T + delta`` by more than tol.
    """
    beta0 = geom.bregman_distance(x0, y)
    running = 0.0
    for T, rec in enumerate(history, start=1):
        running += rec.f_value
        if running / T > f_y + L * beta0 / T + delta + tol:
            return False
    return True


def strong_convexity_certificate(history: list[IterationRecord],
                                 geom: EuclideanGeometry, x0, x_star,
                                 f_star: float, L: float, strong_convexity: float,
                                 delta: float, tol: float = 1e-9) -> bool:
    """Check the geometric residual bound on strongly convex problems.

    For prefixes T whose recorded residuals all stay at least delta, the best
    residual must satisfy
    ``min_k [F(x_k) - F*] <= delta + mu / (e^{gamma T} - 1) * beta(x0, x*)``
    with ``gamma = mu / L``.  Later prefixes fall outside the hypothesis and
    are not checked.
    """
    if strong_convexity <= 0:
        raise ValueError("strong_convexity must be positive for this certificate")
    beta0 = geom.bregman_distance(x0, x_star)
    gamma = strong_convexity / L
    best = math.inf
    for T, rec in enumerate(history, start=1):
        residual = rec.f_value - f_star
        if residual < delta:
            break
        best = min(best, residual)
        bound = delta + strong_convexity / math.expm1(gamma * T) * beta0
        if best > bound + tol:
            return False
    return True


def _stopped_at_start(state: SolverState, f: float, f_opt, epsilon: float) -> bool:
    if f_opt is None:
        return False
    state.residual = f - f_opt
    if state.residual <= epsilon:
        state.converged = True
        return True
    return False


def _finish_iteration(state, config, x, f, L, k, l_trial, doublings, fw_iters,
                      gap, t0, f_opt, observer) -> None:
    state.x = x
    state.L = L
    state.outer_iters = k + 1
    state.fw_steps_total += fw_iters
    rec = IterationRecord(index=k + 1, f_value=f, l_trial=l_trial,
                          doublings=doublings, fw_iterations=fw_iters, gap=gap,
                          elapsed_s=time.perf_counter() - t0)
    state.history.append(rec)
    if state.iterates is not None:
        state.iterates.append(x.copy())
    if observer is not None:
        observer(rec)
    if f_opt is not None:
        state.residual = f - f_opt
        if state.residual <= config.epsilon:
            state.converged = True
