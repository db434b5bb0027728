"""Round sphere target S^n embedded in R^{n+1}.

The target interface is three operations: nearest-point projection,
tangential projection, and the second fundamental form. The sign convention
for the second fundamental form makes the harmonic map system read
Delta u + A(u)(grad u, grad u) = 0, i.e. Delta u + |grad u|^2 u = 0 here.
All operations broadcast over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateProjectionError(ValueError):
    """Input too close to the origin to project onto the sphere."""


@dataclass(frozen=True)
class Sphere:
    """S^n subset R^{n+1} with the round metric."""

    dim: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("sphere dimension must be >= 1")

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1

    def project_point(self, y: np.ndarray) -> np.ndarray:
        """Radial projection y / |y|; rejects near-zero inputs."""
        y = np.asarray(y, dtype=np.float64)
        norms = np.sqrt(np.einsum("...k,...k->...", y, y))
        if np.any(norms <= 1e-12):
            raise DegenerateProjectionError("input norm <= 1e-12, projection undefined")
        return y / norms[..., None]

    def project_tangent(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        """v minus its component along p (p assumed unit)."""
        p = np.asarray(p, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        dots = np.einsum("...k,...k->...", v, p)
        return v - dots[..., None] * p

    def second_fundamental_form(self, p: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """A(p)(X, Y) = <X, Y> p, normal-valued, symmetric bilinear."""
        p = np.asarray(p, dtype=np.float64)
        dots = np.einsum("...k,...k->...", np.asarray(x, dtype=np.float64),
                         np.asarray(y, dtype=np.float64))
        return dots[..., None] * p
