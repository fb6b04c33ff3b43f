"""Euclidean geometry: primal/dual norms, Bregman distance, smoothed conjugate.

The norm pair is induced by a diagonal positive-definite operator B,
``||x|| = <Bx, x>^{1/2}`` and ``||g||_* = <g, B^{-1}g>^{1/2}``, with the
distance function fixed to half the squared primal norm.  Everything here is
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["EuclideanGeometry", "SmoothnessDescriptor"]


@dataclass(frozen=True)
class SmoothnessDescriptor:
    """Two-sided curvature bounds of an objective relative to the squared norm.

    ``lipschitz`` bounds the linearization error from above, ``strong_convexity``
    from below.  ``lipschitz=None`` means unknown; the adaptive solver never
    needs it, only the convergence certificates do.
    """

    lipschitz: float | None
    strong_convexity: float = 0.0

    def __post_init__(self) -> None:
        if self.strong_convexity < 0:
            raise ValueError("strong_convexity must be nonnegative")
        if self.lipschitz is not None and self.lipschitz < self.strong_convexity:
            raise ValueError("lipschitz bound must dominate strong_convexity")


@dataclass(frozen=True, eq=False)
class EuclideanGeometry:
    """Diagonal Euclidean norm pair; identity metric when ``b_diag`` is None."""

    dim: int
    b_diag: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if self.b_diag is not None:
            b = np.ascontiguousarray(self.b_diag, dtype=float)
            if b.shape != (self.dim,):
                raise ValueError(f"b_diag must have shape ({self.dim},), got {b.shape}")
            if not np.all(b > 0):
                raise ValueError("all entries of b_diag must be strictly positive")
            b.setflags(write=False)
            object.__setattr__(self, "b_diag", b)

    def _check_dim(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"expected a vector of dimension {self.dim}, got shape {v.shape}")
        return v

    def norm(self, x) -> float:
        """Primal norm <Bx, x>^{1/2}."""
        x = self._check_dim(x)
        if self.b_diag is None:
            return float(np.sqrt(np.dot(x, x)))
        return float(np.sqrt(np.dot(self.b_diag * x, x)))

    def dual_norm(self, g) -> float:
        """Dual norm <g, B^{-1}g>^{1/2}."""
        return float(np.sqrt(self.dual_norm_sq(g)))

    def dual_norm_sq(self, g) -> float:
        """Squared dual norm, computed without the sqrt/square round trip."""
        g = self._check_dim(g)
        if self.b_diag is None:
            return float(np.dot(g, g))
        return float(np.dot(g / self.b_diag, g))

    def inverse_metric(self, g) -> np.ndarray:
        """Apply B^{-1} to a dual vector."""
        g = self._check_dim(g)
        if self.b_diag is None:
            return g.copy()
        return g / self.b_diag

    def bregman_distance(self, x, y) -> float:
        """Half the squared primal norm of x - y; zero iff x == y."""
        x = self._check_dim(x)
        y = self._check_dim(y)
        d = x - y
        if self.b_diag is None:
            return 0.5 * float(np.dot(d, d))
        return 0.5 * float(np.dot(self.b_diag * d, d))

    def conjugate_argmax(self, s, L: float) -> np.ndarray:
        """Maximizer of <s, y> - L/2 ||y||^2 over the whole space: (1/L) B^{-1} s."""
        if L <= 0:
            raise ValueError("L must be positive")
        return self.inverse_metric(s) / L

    def conjugate_value(self, s, L: float) -> float:
        """Maximum of <s, y> - L/2 ||y||^2, i.e. ||s||_*^2 / (2L)."""
        if L <= 0:
            raise ValueError("L must be positive")
        return self.dual_norm_sq(s) / (2.0 * L)
