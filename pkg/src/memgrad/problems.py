"""Benchmark problem generators with known optima.

The log-sum-exp family smooths a maximum of M random linear functions and is
recentred so the origin is the exact minimizer.  Data is drawn from numpy's
seedable 64-bit generator (PCG64 via ``default_rng``), so identical parameters
give bit-identical problems.  Small diagonal quadratics with a known spectrum
are provided for certificate tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LogSumExpProblem", "QuadraticFixture", "generate",
           "quadratic_fixture", "save_problem", "load_problem"]


@dataclass
class LogSumExpProblem:
    """Smoothed maximum of M linear terms with minimizer at the origin."""

    A: np.ndarray
    b: np.ndarray
    mu: float
    x0: np.ndarray
    f_opt: float
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def num_terms(self) -> int:
        return self.A.shape[0]

    def evaluate(self, x) -> tuple[float, np.ndarray]:
        """Objective value and gradient at x (one oracle call)."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"expected a point of dimension {self.n}, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("point must be finite")
        r = (self.A @ x - self.b) / self.mu
        r_max = float(np.max(r))
        e = np.exp(r - r_max)
        s = float(np.sum(e))
        f = self.mu * (r_max + np.log(s))
        grad = (e / s) @ self.A
        return f, grad

    def weights(self, x) -> np.ndarray:
        """Softmax weights of the linear terms at x; nonnegative, sum to one."""
        x = np.asarray(x, dtype=float)
        r = (self.A @ x - self.b) / self.mu
        e = np.exp(r - np.max(r))
        return e / np.sum(e)

    def gradient_lipschitz_bound(self) -> float:
        """Upper bound lambda_max(A^T A) / mu on the gradient's Lipschitz constant."""
        return float(np.linalg.norm(self.A, 2) ** 2) / self.mu


@dataclass
class QuadraticFixture:
    """Separable quadratic f(x) = sum_i sigma_i x_i^2 / 2 with optimum at 0."""

    spectrum: np.ndarray
    x0: np.ndarray
    f_opt: float = 0.0
    lipschitz: float = field(init=False)
    strong_convexity: float = field(init=False)

    def __post_init__(self) -> None:
        self.spectrum = np.asarray(self.spectrum, dtype=float)
        if self.spectrum.ndim != 1 or not np.all(self.spectrum > 0):
            raise ValueError("spectrum must be a vector of positive values")
        self.lipschitz = float(np.max(self.spectrum))
        self.strong_convexity = float(np.min(self.spectrum))

    @property
    def n(self) -> int:
        return self.spectrum.size

    def evaluate(self, x) -> tuple[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"expected a point of dimension {self.n}, got {x.shape}")
        g = self.spectrum * x
        return 0.5 * float(np.dot(g, x)), g


def generate(n: int, num_terms: int | None = None, mu: float = 0.05,
             seed: int = 0) -> LogSumExpProblem:
    """Draw a log-sum-exp instance with the minimizer shifted to the origin.

    Rows and offsets are uniform on [-1, 1]; the rows are then shifted by the
    gradient at zero so the origin becomes stationary.  The starting point is
    uniform on the unit sphere.  ``num_terms`` defaults to 6 * n.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if num_terms is None:
        num_terms = 6 * n
    if num_terms < 1:
        raise ValueError("num_terms must be at least 1")
    if mu <= 0:
        raise ValueError("mu must be positive")
    rng = np.random.default_rng(seed)
    while True:
        a_hat = rng.uniform(-1.0, 1.0, size=(num_terms, n))
        b = rng.uniform(-1.0, 1.0, size=num_terms)
        if not np.any(np.all(a_hat == 0.0, axis=1)):
            break
    # softmax at zero, then recentre so the gradient vanishes there
    r = -b / mu
    e = np.exp(r - np.max(r))
    w = e / np.sum(e)
    A = a_hat - w @ a_hat
    v = rng.standard_normal(n)
    x0 = v / np.linalg.norm(v)
    problem = LogSumExpProblem(A=A, b=b, mu=mu, x0=x0, f_opt=0.0, seed=seed)
    f0, g0 = problem.evaluate(np.zeros(n))
    if np.max(np.abs(g0)) > 1e-10:
        raise AssertionError("recentred gradient at the origin is not zero")
    problem.f_opt = f0
    return problem


def quadratic_fixture(spectrum, seed: int = 0) -> QuadraticFixture:
    """Diagonal quadratic with the given spectrum and a unit-sphere start."""
    spectrum = np.asarray(spectrum, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(spectrum.size)
    return QuadraticFixture(spectrum=spectrum, x0=v / np.linalg.norm(v))


def save_problem(problem: LogSumExpProblem, path) -> None:
    """Write a problem as text: header ``n M mu seed f_opt``, then rows, then x0.

    Each of the M data lines holds b_j followed by the n entries of the j-th
    row.  Floats use shortest round-trip decimal representation, so a load
    reproduces the data bit-exactly.
    """
    seed = -1 if problem.seed is None else problem.seed
    lines = [f"{problem.n} {problem.num_terms} {problem.mu!r} {seed} {problem.f_opt!r}"]
    for j in range(problem.num_terms):
        row = [repr(float(problem.b[j]))]
        row.extend(repr(float(v)) for v in problem.A[j])
        lines.append(" ".join(row))
    lines.append(" ".join(repr(float(v)) for v in problem.x0))
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write problem file {path}: {exc}") from exc


def load_problem(path) -> LogSumExpProblem:
    """Read a problem written by :func:`save_problem`."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    except OSError as exc:
        raise OSError(f"cannot read problem file {path}: {exc}") from exc
    if not lines:
        raise ValueError(f"problem file {path} is empty")
    header = lines[0].split()
    if len(header) != 5:
        raise ValueError(f"malformed header in problem file {path}")
    n, num_terms = int(header[0]), int(header[1])
    mu, seed, f_opt = float(header[2]), int(header[3]), float(header[4])
    if len(lines) != num_terms + 2:
        raise ValueError(f"problem file {path} has {len(lines)} lines, "
                         f"expected {num_terms + 2}")
    A = np.zeros((num_terms, n))
    b = np.zeros(num_terms)
    for j in range(num_terms):
        vals = [float(t) for t in lines[1 + j].split()]
        if len(vals) != n + 1:
            raise ValueError(f"malformed data row {j} in problem file {path}")
        b[j] = vals[0]
        A[j] = vals[1:]
    x0 = np.array([float(t) for t in lines[-1].split()])
    if x0.shape != (n,):
        raise ValueError(f"malformed starting point in problem file {path}")
    return LogSumExpProblem(A=A, b=b, mu=mu, x0=x0, f_opt=f_opt,
                            seed=None if seed < 0 else seed)
