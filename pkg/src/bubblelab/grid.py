"""Flat-torus domain, map fields, and the discrete calculus used everywhere.

The domain is the flat torus [0, Lx) x [0, Ly) with an nx x ny node grid and
periodic identification. Cells are square (hx == hy) except for the degenerate
ny == 1 circle domain used by the 1-D sweepout toy, where the transverse
measure is Ly.

Two discrete Dirichlet densities appear:

* ``face_density`` (q): half-sum of squared one-sided face differences.
  This is the density whose integral the energies differentiate exactly,
  so it backs every energy, ball and ledger quadrature.
* ``gradient``/``gradient_squared`` (central differences): the pointwise
  Jacobian used by polar sampling, stress tensors and superlevel sets.

Both are second order; they differ by O(h^2) on smooth fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .sphere import Sphere


class InterpolationFloorError(ValueError):
    """Radius too small for reliable bilinear interpolation."""


@dataclass(frozen=True)
class DomainGrid:
    """Periodic rectangle with uniform square cells.

    ``ly=None`` (default) keeps cells square: Ly = Lx * ny / nx. Passing
    ny == 1 gives the circle domain of length Lx with transverse measure ly
    (default 1.0), on which the y-direction operators vanish identically.
    """

    nx: int
    ny: int
    lx: float = 1.0
    ly: float | None = None

    def __post_init__(self):
        if self.nx < 16:
            raise ValueError(f"nx must be >= 16, got {self.nx}")
        if self.ny != 1 and self.ny < 16:
            raise ValueError(f"ny must be >= 16 (or exactly 1), got {self.ny}")
        if self.lx <= 0:
            raise ValueError("lx must be positive")
        if self.ly is None:
            object.__setattr__(self, "ly", 1.0 if self.ny == 1 else self.lx * self.ny / self.nx)
        if self.ly <= 0:
            raise ValueError("ly must be positive")
        if self.ny != 1 and abs(self.hx - self.hy) > 1e-12 * self.hx:
            raise ValueError("cells must be square: lx/nx != ly/ny")

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def h(self) -> float:
        return self.hx

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def volume(self) -> float:
        return self.lx * self.ly

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.nx) * self.hx
        y = np.arange(self.ny) * self.hy
        return x, y

    def periodic_delta(self, center: tuple[float, float]) -> tuple[np.ndarray, np.ndarray]:
        """Signed displacements node - center, wrapped into [-L/2, L/2)."""
        x, y = self.coords()
        dx = np.remainder(x - center[0] + 0.5 * self.lx, self.lx) - 0.5 * self.lx
        dy = np.remainder(y - center[1] + 0.5 * self.ly, self.ly) - 0.5 * self.ly
        return dx, dy

    def distance2(self, center: tuple[float, float]) -> np.ndarray:
        """Squared periodic distance of every node from ``center``, (nx, ny)."""
        dx, dy = self.periodic_delta(center)
        return dx[:, None] ** 2 + dy[None, :] ** 2


@dataclass
class MapField:
    """Discrete map from the torus grid into an embedded round sphere."""

    grid: DomainGrid
    target: Sphere
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        expected = (self.grid.nx, self.grid.ny, self.target.ambient_dim)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")

    def unit_defect(self) -> float:
        norms = np.sqrt(_kernels.squared_norm_field(self.values))
        return float(np.abs(norms - 1.0).max())

    def validate(self, tol: float = 1e-12) -> None:
        d = self.unit_defect()
        if d > tol:
            raise ValueError(f"field leaves the target by {d:.3e} > {tol:.0e}")

    def copy(self) -> "MapField":
        return MapField(self.grid, self.target, self.values.copy())


@dataclass(frozen=True)
class PolarSample:
    """Interpolated value and polar-frame derivatives at one circle point."""

    value: np.ndarray
    radial: np.ndarray
    tangential: np.ndarray
    r: float
    theta: float

    @property
    def grad_sq(self) -> float:
        """|u_r|^2 + |u_theta|^2 / r^2, the polar split of |grad u|^2."""
        return float(self.radial @ self.radial + (self.tangential @ self.tangential) / self.r**2)


# ---------------------------------------------------------------------------
# differential operators


def jacobian(u: MapField) -> np.ndarray:
    """Central-difference Jacobian, shape (nx, ny, 2, m), periodic wraparound."""
    v = u.values
    g = u.grid
    out = np.empty((g.nx, g.ny, 2, v.shape[-1]))
    out[:, :, 0, :] = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2.0 * g.hx)
    out[:, :, 1, :] = (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2.0 * g.hy)
    return out


def gradient_squared(u: MapField) -> np.ndarray:
    """Pointwise |grad u|^2 from the central-difference Jacobian."""
    jac = jacobian(u)
    return np.einsum("ijak,ijak->ij", jac, jac)


def face_density(u: MapField) -> np.ndarray:
    """Face-based Dirichlet density q; integrate(q) is the Dirichlet energy."""
    return _kernels.face_energy_density(u.values, u.grid.hx, u.grid.hy)


def laplacian(u: MapField) -> np.ndarray:
    """Periodic 5-point Laplacian of the node values."""
    return _kernels.laplacian_5pt(u.values, u.grid.hx, u.grid.hy)


def bilaplacian(u: MapField) -> np.ndarray:
    """The 5-point stencil applied twice."""
    g = u.grid
    return _kernels.laplacian_5pt(laplacian(u), g.hx, g.hy)


def laplacian_array(grid: DomainGrid, arr: np.ndarray) -> np.ndarray:
    """5-point Laplacian of an arbitrary (nx, ny, ...) node array."""
    a = arr if arr.ndim == 3 else arr[..., None]
    out = _kernels.laplacian_5pt(np.ascontiguousarray(a, dtype=np.float64), grid.hx, grid.hy)
    return out if arr.ndim == 3 else out[..., 0]


# ---------------------------------------------------------------------------
# quadrature


def integrate(grid: DomainGrid, f: np.ndarray) -> float:
    """Sum of node values times the cell measure.

    The reduction is a strict left-to-right accumulation in row-major node
    order, so an independently coded plain loop reproduces it bit-exactly.
    On the periodic grid this is the trapezoid rule.
    """
    if f.shape != grid.shape:
        raise ValueError(f"field shape {f.shape} != grid shape {grid.shape}")
    flat = np.ascontiguousarray(f, dtype=np.float64).ravel()
    return float(np.add.accumulate(flat)[-1]) * grid.cell_area


def masked_sum(f: np.ndarray, mask: np.ndarray) -> float:
    """Left-to-right sum of f over mask, row-major order (no measure factor)."""
    vals = np.ascontiguousarray(f, dtype=np.float64)[mask]
    if vals.size == 0:
        return 0.0
    return float(np.add.accumulate(vals)[-1])


def ball_mask(grid: DomainGrid, center: tuple[float, float], r: float) -> np.ndarray:
    """Nodes with periodic distance strictly below r."""
    return grid.distance2(center) < r * r


def ball_energy(u: MapField, center: tuple[float, float], r: float,
                density: np.ndarray | None = None) -> float:
    """Dirichlet energy over the periodic ball B_r(center) by node membership.

    ``density`` lets callers reuse a precomputed face density; it must come
    from :func:`face_density` on the same field.
    """
    rmax = 0.5 * min(u.grid.lx, u.grid.ly)
    if not 0.0 < r <= rmax:
        raise ValueError(f"radius {r} outside (0, {rmax}]")
    dens = face_density(u) if density is None else density
    return masked_sum(dens, ball_mask(u.grid, center, r)) * u.grid.cell_area


# ---------------------------------------------------------------------------
# interpolation and polar sampling


def bilinear_sample(grid: DomainGrid, arr: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of a node array at physical points (.., 2).

    Periodic in both directions; cell ownership follows the lower-left
    convention (floor of the fractional index).
    """
    pts = np.asarray(pts, dtype=np.float64)
    fx = pts[..., 0] / grid.hx
    fy = pts[..., 1] / grid.hy
    i0 = np.floor(fx).astype(np.int64)
    j0 = np.floor(fy).astype(np.int64)
    tx = fx - i0
    ty = fy - j0
    i0 %= grid.nx
    j0 %= grid.ny
    i1 = (i0 + 1) % grid.nx
    j1 = (j0 + 1) % grid.ny
    for _ in range(arr.ndim - 2):
        tx = tx[..., None]
        ty = ty[..., None]
    a00 = arr[i0, j0]
    a10 = arr[i1, j0]
    a01 = arr[i0, j1]
    a11 = arr[i1, j1]
    return (a00 * (1 - tx) * (1 - ty) + a10 * tx * (1 - ty)
            + a01 * (1 - tx) * ty + a11 * tx * ty)


def circle_sample_count(grid: DomainGrid, r: float) -> int:
    return max(16, int(math.ceil(2.0 * math.pi * r / grid.h)))


def polar_ring(u: MapField, center: tuple[float, float], r: float,
               ntheta: int | None = None, jac: np.ndarray | None = None) -> dict:
    """Values and polar-frame derivatives on the circle of radius r.

    Returns arrays over ntheta uniform angles: value (n, m), radial (n, m),
    tangential (n, m) = u_theta, grad_sq (n,), plus theta and the arclength
    weight ds = 2 pi r / n of the periodic trapezoid rule.
    """
    if r <= 2.0 * u.grid.h:
        raise InterpolationFloorError(f"radius {r} <= 2h = {2*u.grid.h}; interpolation unreliable")
    n = circle_sample_count(u.grid, r) if ntheta is None else ntheta
    theta = np.arange(n) * (2.0 * math.pi / n)
    ct, st = np.cos(theta), np.sin(theta)
    pts = np.stack([center[0] + r * ct, center[1] + r * st], axis=-1)
    vals = bilinear_sample(u.grid, u.values, pts)
    jfield = jacobian(u) if jac is None else jac
    jmat = bilinear_sample(u.grid, jfield, pts)  # (n, 2, m)
    e_r = np.stack([ct, st], axis=-1)
    e_t = np.stack([-st, ct], axis=-1)
    radial = np.einsum("na,nak->nk", e_r, jmat)
    # u_theta = du/dtheta = r * (J e_t)
    tangential = r * np.einsum("na,nak->nk", e_t, jmat)
    grad_sq = np.einsum("nak,nak->n", jmat, jmat)
    return {
        "theta": theta,
        "value": vals,
        "radial": radial,
        "tangential": tangential,
        "grad_sq": grad_sq,
        "ds": 2.0 * math.pi * r / n,
    }


def polar_sample(u: MapField, center: tuple[float, float], r: float, theta: float) -> PolarSample:
    """Interpolated value, u_r and u_theta at one polar point around center."""
    if r <= 2.0 * u.grid.h:
        raise InterpolationFloorError(f"radius {r} <= 2h = {2*u.grid.h}; interpolation unreliable")
    ct, st = math.cos(theta), math.sin(theta)
    pt = np.array([center[0] + r * ct, center[1] + r * st])
    val = bilinear_sample(u.grid, u.values, pt)
    jmat = bilinear_sample(u.grid, jacobian(u), pt)  # (2, m)
    radial = ct * jmat[0] + st * jmat[1]
    tangential = r * (-st * jmat[0] + ct * jmat[1])
    return PolarSample(value=val, radial=radial, tangential=tangential, r=r, theta=theta)
