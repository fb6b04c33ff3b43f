"""Piece-wise linear lower model of a smooth convex objective.

The model is the pointwise maximum of first-order planes collected at test
points.  The bundle keeps, for up to ``capacity`` planes, the points, values,
gradients, the offset vector used to evaluate planes cheaply, and the Gram
matrix of the gradients in the dual inner product.  Replacing a plane
refreshes exactly one row/column of the Gram matrix, so an update costs
O(capacity * dim).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import EuclideanGeometry

__all__ = ["CYCLIC", "MAX_NORM", "STRATEGIES", "BundleEntry", "Bundle", "make_entry"]

CYCLIC = "cyclic"
MAX_NORM = "max-norm"
STRATEGIES = (CYCLIC, MAX_NORM)


@dataclass
class BundleEntry:
    """One stored plane: test point, objective value, gradient, cached norm."""

    z: np.ndarray
    f: float
    g: np.ndarray
    g_dual_norm_sq: float


def make_entry(geom: EuclideanGeometry, z, f: float, g) -> BundleEntry:
    """Build an entry from one oracle answer, caching the squared dual norm."""
    z = np.asarray(z, dtype=float)
    g = np.asarray(g, dtype=float)
    return BundleEntry(z=z, f=float(f), g=g, g_dual_norm_sq=geom.dual_norm_sq(g))


class Bundle:
    """Bounded set of planes with two replacement strategies.

    The entry inserted last always describes the solver's current iterate and
    sits at ``current_index``; it is never the one evicted by its own
    insertion.  Older iterates carry no protection.
    """

    def __init__(self, geom: EuclideanGeometry, capacity: int, strategy: str,
                 first: BundleEntry):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        if strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
        self.geom = geom
        self.capacity = int(capacity)
        self.strategy = strategy
        n = geom.dim
        self._z = np.zeros((capacity, n))
        self._f = np.zeros(capacity)
        self._grads = np.zeros((capacity, n))
        self._f_star = np.zeros(capacity)
        self._gram = np.zeros((capacity, capacity))
        self.size = 0
        self.current_index = 0
        self.cyclic_cursor = 0
        self.insert(first)

    @property
    def gram(self) -> np.ndarray:
        """View of the active block of the Gram matrix G* B^{-1} G."""
        return self._gram[: self.size, : self.size]

    def entry(self, i: int) -> BundleEntry:
        """Copy of the i-th stored plane."""
        if not 0 <= i < self.size:
            raise IndexError(f"slot {i} out of range for bundle of size {self.size}")
        return BundleEntry(z=self._z[i].copy(), f=float(self._f[i]),
                           g=self._grads[i].copy(),
                           g_dual_norm_sq=float(self._gram[i, i]))

    def insert(self, entry: BundleEntry) -> int:
        """Store a new plane, evicting per strategy when full; returns the slot.

        Below capacity the entry is appended.  At capacity, cyclic replacement
        overwrites the cursor slot and advances it; max-norm replacement
        overwrites the slot whose gradient has the largest cached squared dual
        norm (lowest index on ties).
        """
        if entry.z.shape != (self.geom.dim,) or entry.g.shape != (self.geom.dim,):
            raise ValueError("entry dimension does not match the bundle geometry")
        if self.size < self.capacity:
            slot = self.size
            self.size += 1
        elif self.strategy == CYCLIC:
            slot = self.cyclic_cursor
            self.cyclic_cursor = (slot + 1) % self.capacity
        else:
            slot = int(np.argmax(np.diagonal(self._gram)[: self.size]))
        self._z[slot] = entry.z
        self._f[slot] = entry.f
        self._grads[slot] = entry.g
        self._f_star[slot] = float(np.dot(entry.g, entry.z)) - entry.f
        self.current_index = slot
        self.refresh_gram(slot)
        # keep the cached diagonal bit-identical to the entry's cached norm
        self._gram[slot, slot] = entry.g_dual_norm_sq
        return slot

    def refresh_gram(self, slot: int) -> None:
        """Recompute row/column ``slot`` of the Gram matrix from the gradients."""
        if not 0 <= slot < self.size:
            raise IndexError(f"slot {slot} out of range for bundle of size {self.size}")
        g_scaled = self.geom.inverse_metric(self._grads[slot])
        q = self._grads[: self.size] @ g_scaled
        self._gram[slot, : self.size] = q
        self._gram[: self.size, slot] = q

    def plane_values(self, x) -> np.ndarray:
        """Values of every stored plane at x: f_i + <g_i, x - z_i> componentwise."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.geom.dim,):
            raise ValueError("point dimension does not match the bundle geometry")
        return self._grads[: self.size] @ x - self._f_star[: self.size]

    def model_value(self, x) -> float:
        """Model value at x: the maximum over all stored planes."""
        if self.size == 0:
            raise ValueError("bundle is empty")
        return float(np.max(self.plane_values(x)))

    def gradient_combination(self, lam) -> np.ndarray:
        """Weighted gradient combination G @ lam for weights over the planes."""
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (self.size,):
            raise ValueError(f"expected {self.size} weights, got shape {lam.shape}")
        return self._grads[: self.size].T @ lam
