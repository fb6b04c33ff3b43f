"""Gradient methods with a piece-wise linear memory model.

A first-order solver for smooth convex minimization that remembers past
linearizations in a bounded bundle, solves the per-step quadratic dual over
the simplex with Frank-Wolfe, and adapts the step constant by a doubling line
search.  Includes generators for benchmark problems with known optima and a
CLI harness (``memgrad-bench``).
"""

from .bundle import CYCLIC, MAX_NORM, Bundle, BundleEntry, make_entry
from .fw import FWResult, SimplexPoint
from .geometry import EuclideanGeometry, SmoothnessDescriptor
from .problems import (LogSumExpProblem, QuadraticFixture, generate,
                       load_problem, quadratic_fixture, save_problem)
from .solver import (ADAPTIVE, FIXED, IterationRecord, SolverConfig, SolverState,
                     accept_test, adaptive_run, fixed_run, gradient_descent_run,
                     gradient_step, memory_step, rate_certificate,
                     strong_convexity_certificate)

__version__ = "0.1.0"

__all__ = [
    "ADAPTIVE", "CYCLIC", "FIXED", "MAX_NORM",
    "Bundle", "BundleEntry", "EuclideanGeometry", "FWResult", "IterationRecord",
    "LogSumExpProblem", "QuadraticFixture", "SimplexPoint", "SmoothnessDescriptor",
    "SolverConfig", "SolverState",
    "accept_test", "adaptive_run", "fixed_run", "generate",
    "gradient_descent_run", "gradient_step", "load_problem", "make_entry",
    "memory_step", "quadratic_fixture", "rate_certificate", "save_problem",
    "strong_convexity_certificate",
]
