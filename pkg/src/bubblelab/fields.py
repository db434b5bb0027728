"""Analytic map constructions: wraps, bubbles, sweepout circles, random fields."""

from __future__ import annotations

import math

import numpy as np

from .grid import DomainGrid, MapField
from .sphere import Sphere


def smoothstep_quintic(s: np.ndarray) -> np.ndarray:
    """C^2 ramp 0 -> 1 on [0, 1]: s^3 (6 s^2 - 15 s + 10), clamped outside."""
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (s * (6.0 * s - 15.0) + 10.0)


def constant_map(grid: DomainGrid, target: Sphere, point: np.ndarray | None = None) -> MapField:
    p = np.zeros(target.ambient_dim)
    p[-1] = 1.0
    if point is not None:
        p = target.project_point(np.asarray(point, dtype=np.float64))
    vals = np.broadcast_to(p, (grid.nx, grid.ny, target.ambient_dim)).copy()
    return MapField(grid, target, vals)


def great_circle_wrap(grid: DomainGrid, target: Sphere, turns: int = 1) -> MapField:
    """x -> (cos 2 pi k x / Lx, sin 2 pi k x / Lx, 0, ...), an exact discrete
    critical point of every energy here by symmetry."""
    if target.ambient_dim < 2:
        raise ValueError("need ambient dimension >= 2")
    x, _ = grid.coords()
    phase = 2.0 * math.pi * turns * x / grid.lx
    vals = np.zeros((grid.nx, grid.ny, target.ambient_dim))
    vals[:, :, 0] = np.cos(phase)[:, None]
    vals[:, :, 1] = np.sin(phase)[:, None]
    return MapField(grid, target, vals)


def bubble_values(points: np.ndarray, scale: float) -> np.ndarray:
    """Standard degree-1 sphere map of the plane at the given concentration
    scale: conformal, |grad|^2 = 8 scale^2 / (scale^2 + |x|^2)^2, total
    Dirichlet energy 8 pi. Maps 0 to the north pole and infinity to the south.
    """
    pts = np.asarray(points, dtype=np.float64)
    r2 = pts[..., 0] ** 2 + pts[..., 1] ** 2
    denom = scale * scale + r2
    out = np.empty(pts.shape[:-1] + (3,))
    out[..., 0] = 2.0 * scale * pts[..., 0] / denom
    out[..., 1] = 2.0 * scale * pts[..., 1] / denom
    out[..., 2] = (scale * scale - r2) / denom
    return out


def planted_bubble(grid: DomainGrid, target: Sphere, scale: float,
                   center: tuple[float, float] = (0.5, 0.5),
                   pure_radius: float = 0.25,
                   outer_radius: float = 0.49) -> MapField:
    """Degree-1 bubble placed on the torus.

    Inside ``pure_radius`` the field is the exact plane bubble; between
    ``pure_radius`` and ``outer_radius`` the residual against the south pole
    is faded out by a quintic C^1 blend; beyond it the map is the south pole.
    The result is renormalized onto the sphere nodewise.
    """
    if target.ambient_dim != 3:
        raise ValueError("planted bubble needs an S^2 target")
    if not 0.0 < pure_radius < outer_radius <= 0.5 * math.hypot(grid.lx, grid.ly):
        raise ValueError("need 0 < pure_radius < outer_radius within the torus")
    dx, dy = grid.periodic_delta(center)
    pts = np.empty((grid.nx, grid.ny, 2))
    pts[:, :, 0] = dx[:, None]
    pts[:, :, 1] = dy[None, :]
    vals = bubble_values(pts, scale)
    south = np.array([0.0, 0.0, -1.0])
    rr = np.sqrt(pts[..., 0] ** 2 + pts[..., 1] ** 2)
    fade = 1.0 - smoothstep_quintic((rr - pure_radius) / (outer_radius - pure_radius))
    vals = south + fade[..., None] * (vals - south)
    return MapField(grid, target, target.project_point(vals))


def latitude_circle(grid: DomainGrid, target: Sphere, polar_angle: float,
                    turns: int = 1) -> MapField:
    """Circle-domain map onto the latitude circle at the given polar angle,
    constant angular speed; the equator (angle pi/2) is a closed geodesic."""
    if target.ambient_dim != 3:
        raise ValueError("latitude circles need an S^2 target")
    x, _ = grid.coords()
    phase = 2.0 * math.pi * turns * x / grid.lx
    s, c = math.sin(polar_angle), math.cos(polar_angle)
    vals = np.zeros((grid.nx, grid.ny, 3))
    vals[:, :, 0] = (s * np.cos(phase))[:, None]
    vals[:, :, 1] = (s * np.sin(phase))[:, None]
    vals[:, :, 2] = c
    return MapField(grid, target, vals)


def fourier_map(seed: int, ambient_dim: int = 3, max_mode: int = 2,
                amplitude: float = 0.6):
    """Deterministic smooth R^m-valued trigonometric polynomial on the unit
    torus, returned as a closure usable at any resolution. The constant part
    is a unit vector so the field stays far from the origin for projection.
    """
    rng = np.random.default_rng(seed)
    modes = [(kx, ky) for kx in range(-max_mode, max_mode + 1)
             for ky in range(-max_mode, max_mode + 1) if (kx, ky) != (0, 0)]
    coeff_c = rng.normal(size=(len(modes), ambient_dim))
    coeff_s = rng.normal(size=(len(modes), ambient_dim))
    norm = math.sqrt(sum(2.0 for _ in modes))
    coeff_c *= amplitude / norm
    coeff_s *= amplitude / norm
    base = np.zeros(ambient_dim)
    base[-1] = 1.0

    def evaluate(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.broadcast_to(base, np.broadcast_shapes(np.shape(x), np.shape(y)) + (ambient_dim,)).copy()
        for (kx, ky), cc, cs in zip(modes, coeff_c, coeff_s):
            phase = 2.0 * math.pi * (kx * np.asarray(x) + ky * np.asarray(y))
            out += np.cos(phase)[..., None] * cc + np.sin(phase)[..., None] * cs
        return out

    return evaluate


def random_smooth_field(grid: DomainGrid, target: Sphere, seed: int,
                        max_mode: int = 2, amplitude: float = 0.6) -> MapField:
    """Projection of a random smooth trigonometric field onto the sphere."""
    f = fourier_map(seed, target.ambient_dim, max_mode, amplitude)
    x, y = grid.coords()
    vals = f(x[:, None] / grid.lx, y[None, :] / grid.ly)
    return MapField(grid, target, target.project_point(vals))


def random_tangent_field(u: MapField, seed: int, max_mode: int = 2,
                         amplitude: float = 1.0) -> np.ndarray:
    """Smooth random section of the pullback tangent bundle along u."""
    f = fourier_map(seed, u.target.ambient_dim, max_mode, amplitude)
    x, y = u.grid.coords()
    raw = f(x[:, None] / u.grid.lx, y[None, :] / u.grid.ly)
    return u.target.project_tangent(u.values, raw)
