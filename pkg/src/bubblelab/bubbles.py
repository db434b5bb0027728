"""Concentration analysis: bubble detection, blow-up rescaling, annulus and
neck profiles, Hopf-type circle balances, stress-energy tensors, and the
energy-identity ledger.

Ball and annulus quadratures are node-membership sums of the face-based
Dirichlet density, so they partition the total energy exactly; polar
quadratures interpolate the central-difference Jacobian on circles. The two
agree to a few percent on smooth fields, which the tests pin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .grid import (DomainGrid, MapField, ball_energy, ball_mask, bilinear_sample,
                   face_density, gradient_squared, jacobian, laplacian,
                   laplacian_array, masked_sum, polar_ring)
from .sphere import Sphere


class UnderResolvedBubbleError(RuntimeError):
    """Detected concentration radius too close to the grid spacing."""


@dataclass(frozen=True)
class AnalysisConfig:
    """Thresholds and window geometry for concentration analysis.

    eps0 is the concentration threshold (the detector solves for the radius
    holding eps0/2 of energy), delta the neck smallness level, inner_factor
    the blow-up window multiple of the detected radius, outer_radius the
    fixed outer scale separating bubbles from the body map.
    """

    eps0: float = 1.0
    delta: float = 0.1
    inner_factor: float = 4.0
    outer_radius: float = 0.25
    dyadic_base: float = 2.0
    rescale_nodes: int = 128
    min_radius_cells: float = 4.0
    radius_tol: float = 1e-12

    def __post_init__(self):
        if self.eps0 <= 0:
            raise ValueError("eps0 must be positive")
        if not 0.0 < self.delta < self.eps0:
            raise ValueError("need 0 < delta < eps0")
        if self.inner_factor < 2.0:
            raise ValueError("inner_factor must be >= 2")
        if self.outer_radius <= 0:
            raise ValueError("outer_radius must be positive")


@dataclass
class BubbleRecord:
    """One detected concentration event."""

    center: tuple
    radius: float
    conc_value: float
    window_radius: float
    window_capped: bool
    energy: float                 # Dirichlet energy inside the window
    exponent: float | None = None  # radius^(1 - alpha) for alpha runs
    eps_ratio: float | None = None  # eps / radius^2 for biharmonic runs
    rescaled: MapField | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "center": [float(c) for c in self.center],
            "radius": float(self.radius),
            "conc_value": float(self.conc_value),
            "window_radius": float(self.window_radius),
            "window_capped": bool(self.window_capped),
            "energy": float(self.energy),
            "exponent": None if self.exponent is None else float(self.exponent),
            "eps_ratio": None if self.eps_ratio is None else float(self.eps_ratio),
        }


# ---------------------------------------------------------------------------
# concentration function and detection


def _ball_sums_all_centers(grid: DomainGrid, density: np.ndarray, r: float) -> np.ndarray:
    """Ball-energy sums around every node at once via FFT convolution."""
    disk = (grid.distance2((0.0, 0.0)) < r * r).astype(np.float64)
    conv = np.fft.irfft2(np.fft.rfft2(density) * np.fft.rfft2(disk), s=density.shape)
    return conv * grid.cell_area


def concentration_function(u: MapField, r: float,
                           density: np.ndarray | None = None) -> tuple[float, tuple]:
    """max over grid centers y of E(u, B_r(y)) and the maximizing center.

    The search runs over an FFT convolution; the returned value is recomputed
    by the direct node-membership sum at the winning center, so it is
    consistent with :func:`ball_energy` to the last bit. Ties in the search
    break toward the lexicographically first node.
    """
    rmax = 0.5 * min(u.grid.lx, u.grid.ly)
    if not 0.0 < r <= rmax:
        raise ValueError(f"radius {r} outside (0, {rmax}]")
    dens = face_density(u) if density is None else density
    sums = _ball_sums_all_centers(u.grid, dens, r)
    idx = np.unravel_index(int(np.argmax(sums)), sums.shape)
    center = (idx[0] * u.grid.hx, idx[1] * u.grid.hy)
    value = ball_energy(u, center, r, density=dens)
    return value, center


def concentration_exponent(r: float, alpha: float) -> float:
    """radius^(1 - alpha); equals 1 at alpha = 1 and is >= 1 for radii < 1."""
    if not 0.0 < r:
        raise ValueError("radius must be positive")
    if not alpha >= 1.0:
        raise ValueError("alpha must be >= 1")
    return float(r ** (1.0 - alpha))


def eps_ratio(eps: float, r: float) -> float:
    """eps / r^2, the rescaled regularization strength at the bubble scale."""
    if eps < 0 or r <= 0:
        raise ValueError("need eps >= 0 and r > 0")
    return float(eps / (r * r))


def detect_bubble(u: MapField, cfg: AnalysisConfig,
                  alpha: float | None = None, eps: float | None = None,
                  density: np.ndarray | None = None,
                  with_rescaled: bool = True) -> BubbleRecord | None:
    """Locate the strongest concentration event, if any.

    Returns None when the concentration function at the outer radius stays
    below eps0/2. Otherwise bisects the monotone concentration function down
    to the jump radius where it crosses eps0/2; with node-membership balls
    the function is a step function of r, so the bisection brackets the
    crossing to cfg.radius_tol and reports the upper end.
    """
    dens = face_density(u) if density is None else density
    half = 0.5 * cfg.eps0
    hi = cfg.outer_radius
    val_hi, center_hi = concentration_function(u, hi, density=dens)
    if val_hi < half:
        return None
    lo = 0.0
    while hi - lo > cfg.radius_tol:
        mid = 0.5 * (lo + hi)
        val, center = concentration_function(u, mid, density=dens)
        if val >= half:
            hi, val_hi, center_hi = mid, val, center
        else:
            lo = mid
    radius = hi
    center = center_hi
    if radius <= cfg.min_radius_cells * u.grid.h:
        raise UnderResolvedBubbleError(
            f"bubble radius {radius:.4g} <= {cfg.min_radius_cells} h = "
            f"{cfg.min_radius_cells * u.grid.h:.4g}; field too coarse to analyze")
    window = cfg.inner_factor * radius
    capped = window > cfg.outer_radius
    if capped:
        window = cfg.outer_radius
    rec = BubbleRecord(
        center=center, radius=radius, conc_value=val_hi,
        window_radius=window, window_capped=capped,
        energy=ball_energy(u, center, window, density=dens),
        exponent=None if alpha is None else concentration_exponent(radius, alpha),
        eps_ratio=None if eps is None else eps_ratio(eps, radius),
    )
    if with_rescaled:
        factor = window / radius
        rec.rescaled = rescale(u, center, radius, factor,
                               nodes=cfg.rescale_nodes, outer_radius=cfg.outer_radius)
    return rec


def detect_bubbles(u: MapField, cfg: AnalysisConfig,
                   alpha: float | None = None, eps: float | None = None,
                   max_count: int = 4) -> list[BubbleRecord]:
    """Greedy multi-bubble detection, strongest concentration first; each
    find masks its window out of the density before the next pass."""
    dens = face_density(u).copy()
    found: list[BubbleRecord] = []
    for _ in range(max_count):
        rec = detect_bubble(u, cfg, alpha=alpha, eps=eps, density=dens)
        if rec is None:
            break
        found.append(rec)
        dens[ball_mask(u.grid, rec.center, rec.window_radius)] = 0.0
    return found


def rescale(u: MapField, center: tuple, r: float, factor: float,
            nodes: int = 128, outer_radius: float | None = None) -> MapField:
    """Blow-up v(x) = u(center + r x) on the window [-factor, factor]^2.

    The window is sampled bilinearly onto a fresh nodes^2 grid (side length
    2 factor, bubble center at window coordinates (factor, factor)) and
    renormalized onto the target. The container is periodic while the window
    content is not, so the wrap seam along the window boundary carries a
    spurious mismatch; derivative quadratures of the blow-up should stay a
    couple of cells inside the boundary.
    """
    limit = outer_radius if outer_radius is not None else 0.5 * min(u.grid.lx, u.grid.ly)
    if factor * r > limit * (1.0 + 1e-12):
        raise ValueError(f"window {factor * r:.4g} exceeds the outer radius {limit:.4g}")
    half = factor * r
    window = DomainGrid(nodes, nodes, lx=2.0 * factor)
    xi = -half + np.arange(nodes) * (2.0 * half / nodes)
    pts = np.empty((nodes, nodes, 2))
    pts[:, :, 0] = center[0] + xi[:, None]
    pts[:, :, 1] = center[1] + xi[None, :]
    vals = bilinear_sample(u.grid, u.values, pts)
    return MapField(window, u.target, u.target.project_point(vals))


def superlevel_ratio(u: MapField, center: tuple, r: float, eps0: float) -> float:
    """Measure of {x in B_r(center): |grad u| >= sqrt(eps0) / (2 sqrt(pi) r)}
    divided by r^2, by node counting."""
    if r <= 0 or eps0 <= 0:
        raise ValueError("need r > 0 and eps0 > 0")
    threshold = math.sqrt(eps0) / (2.0 * math.sqrt(math.pi) * r)
    gm = np.sqrt(gradient_squared(u))
    inside = ball_mask(u.grid, center, r) & (gm >= threshold)
    return float(np.count_nonzero(inside)) * u.grid.cell_area / (r * r)


# ---------------------------------------------------------------------------
# annulus profiles and Hopf balances


@dataclass(frozen=True)
class AnnulusBand:
    r_in: float
    r_out: float
    radial: float
    tangential: float
    total: float
    radii: tuple
    imbalance: tuple  # per-circle radial minus tangential line integrals


@dataclass(frozen=True)
class AnnulusProfile:
    r_in: float
    r_out: float
    bands: tuple
    radial: float
    tangential: float
    total: float


def circle_split(u: MapField, center: tuple, r: float,
                 jac: np.ndarray | None = None) -> tuple[float, float]:
    """Line integrals over the circle of radius r: (radial, tangential) =
    (oint |u_r|^2 ds, oint |u_theta|^2 / r^2 ds). Equal for conformal maps."""
    ring = polar_ring(u, center, r, jac=jac)
    rad = float(np.sum(np.einsum("nk,nk->n", ring["radial"], ring["radial"]))) * ring["ds"]
    tan = float(np.sum(np.einsum("nk,nk->n", ring["tangential"], ring["tangential"]))) * ring["ds"] / r**2
    return rad, tan


def annulus_profile(u: MapField, center: tuple, r1: float, r2: float,
                    radii_per_band: int = 12,
                    dyadic_base: float = 2.0) -> AnnulusProfile:
    """Dyadic radial/tangential energy split of the annulus A(r1, r2).

    Each dyadic band integrates the polar densities r |u_r|^2 and
    |u_theta|^2 / r over log-spaced circles with the trapezoid rule; band
    totals are radial + tangential by the polar Pythagoras identity.
    """
    if r1 <= 2.0 * u.grid.h:
        raise ValueError(f"inner radius {r1} at or below interpolation floor {2*u.grid.h}")
    if not r1 < r2:
        raise ValueError("need r1 < r2")
    jac = jacobian(u)
    bands = []
    a = r1
    while a < r2 * (1.0 - 1e-12):
        b = min(a * dyadic_base, r2)
        radii = np.exp(np.linspace(math.log(a), math.log(b), radii_per_band + 1))
        rad_line = np.empty(radii.size)
        tan_line = np.empty(radii.size)
        for i, r in enumerate(radii):
            rad_line[i], tan_line[i] = circle_split(u, center, r, jac=jac)
        rad = float(np.trapezoid(rad_line, radii))
        tan = float(np.trapezoid(tan_line, radii))
        bands.append(AnnulusBand(
            r_in=a, r_out=b, radial=rad, tangential=tan, total=rad + tan,
            radii=tuple(float(r) for r in radii),
            imbalance=tuple(float(x) for x in (rad_line - tan_line)),
        ))
        a = b
    radial = sum(b.radial for b in bands)
    tangential = sum(b.tangential for b in bands)
    return AnnulusProfile(r_in=r1, r_out=r2, bands=tuple(bands),
                          radial=radial, tangential=tangential,
                          total=radial + tangential)


@dataclass(frozen=True)
class HopfAlphaBalance:
    """Circle balance for the alpha system: lhs <= c * circle_term +
    c (alpha - 1) ball_term with an unspecified constant; the pieces are
    reported separately so the constant can be fitted, never assumed."""

    r: float
    lhs: float
    circle_term: float
    ball_term: float


def hopf_balance_alpha(u: MapField, center: tuple, r: float, alpha: float,
                       jac: np.ndarray | None = None,
                       density: np.ndarray | None = None) -> HopfAlphaBalance:
    ring = polar_ring(u, center, r, jac=jac)
    rad2 = np.einsum("nk,nk->n", ring["radial"], ring["radial"])
    tan2 = np.einsum("nk,nk->n", ring["tangential"], ring["tangential"]) / r**2
    weight = np.exp((alpha - 1.0) * np.log1p(rad2 + tan2))
    lhs = float(np.sum(weight * rad2)) * ring["ds"]
    circle_term = float(np.sum(weight * (1.0 + tan2))) * ring["ds"]
    q = face_density(u) if density is None else density
    ball = masked_sum(np.exp(alpha * np.log1p(q)), ball_mask(u.grid, center, r)) * u.grid.cell_area
    ball_term = (alpha - 1.0) / r * ball
    return HopfAlphaBalance(r=r, lhs=lhs, circle_term=circle_term, ball_term=ball_term)


@dataclass(frozen=True)
class HopfBiharmonicBalance:
    """Circle balance for the fourth-order system: lhs vs tangential term
    plus the two eps-weighted remainders, components reported separately."""

    r: float
    lhs: float
    tangential_term: float
    ball_term: float
    circle_term: float


def _smooth_once(grid: DomainGrid, arr: np.ndarray) -> np.ndarray:
    """Separable (1/4, 1/2, 1/4) pass; tames noise before triple differencing."""
    out = 0.5 * arr + 0.25 * (np.roll(arr, 1, axis=0) + np.roll(arr, -1, axis=0))
    out = 0.5 * out + 0.25 * (np.roll(out, 1, axis=1) + np.roll(out, -1, axis=1))
    return out


def _central_diff(grid: DomainGrid, arr: np.ndarray, axis: int) -> np.ndarray:
    h = grid.hx if axis == 0 else grid.hy
    return (np.roll(arr, -1, axis=axis) - np.roll(arr, 1, axis=axis)) / (2.0 * h)


def third_derivative_norm(u: MapField) -> np.ndarray:
    """Pointwise Frobenius norm of the third derivative tensor, computed by
    repeated central differencing after one smoothing pass."""
    v = _smooth_once(u.grid, u.values)
    total = np.zeros(u.grid.shape)
    for a in (0, 1):
        da = _central_diff(u.grid, v, a)
        for b in (0, 1):
            dab = _central_diff(u.grid, da, b)
            for c in (0, 1):
                dabc = _central_diff(u.grid, dab, c)
                total += np.einsum("ijk,ijk->ij", dabc, dabc)
    return np.sqrt(total)


def hopf_balance_biharmonic(u: MapField, center: tuple, r: float, eps: float,
                            jac: np.ndarray | None = None) -> HopfBiharmonicBalance:
    ring = polar_ring(u, center, r, jac=jac)
    rad2 = np.einsum("nk,nk->n", ring["radial"], ring["radial"])
    tan2 = np.einsum("nk,nk->n", ring["tangential"], ring["tangential"]) / r**2
    lhs = float(np.sum(rad2)) * ring["ds"]
    tangential_term = float(np.sum(tan2)) * ring["ds"]
    lap_sq = _kernels.squared_norm_field(laplacian(u))
    ball = masked_sum(lap_sq, ball_mask(u.grid, center, r)) * u.grid.cell_area
    ball_term = eps / r * ball
    if eps == 0.0:
        circle_term = 0.0
    else:
        grad_norm = np.sqrt(gradient_squared(u))
        third = third_derivative_norm(u)
        ct, st = np.cos(ring["theta"]), np.sin(ring["theta"])
        pts = np.stack([center[0] + r * ct, center[1] + r * st], axis=-1)
        lap_i = bilinear_sample(u.grid, lap_sq, pts)
        mixed_i = bilinear_sample(u.grid, grad_norm * third, pts)
        circle_term = eps * float(np.sum(lap_i + mixed_i)) * ring["ds"]
    return HopfBiharmonicBalance(r=r, lhs=lhs, tangential_term=tangential_term,
                                 ball_term=ball_term, circle_term=circle_term)


# ---------------------------------------------------------------------------
# stress-energy tensors


@dataclass(frozen=True)
class TensorField:
    """Symmetric 2x2 tensor per node with its discrete divergence and the
    pairing field it should match on critical points."""

    components: np.ndarray   # (nx, ny, 2, 2)
    divergence: np.ndarray   # (nx, ny, 2)
    reference: np.ndarray    # (nx, ny, 2)

    @property
    def trace(self) -> np.ndarray:
        return self.components[..., 0, 0] + self.components[..., 1, 1]


def _tensor_divergence(grid: DomainGrid, s: np.ndarray) -> np.ndarray:
    div = np.empty(s.shape[:2] + (2,))
    for b in (0, 1):
        div[..., b] = (_central_diff(grid, s[..., 0, b], 0)
                       + _central_diff(grid, s[..., 1, b], 1))
    return div


def _first_stress(u: MapField, jac: np.ndarray) -> np.ndarray:
    gsq = np.einsum("ijak,ijak->ij", jac, jac)
    s = np.empty(u.grid.shape + (2, 2))
    for a in (0, 1):
        for b in (0, 1):
            s[..., a, b] = -np.einsum("ijk,ijk->ij", jac[:, :, a], jac[:, :, b])
        s[..., a, a] += 0.5 * gsq
    return s


def stress_energy_1(u: MapField) -> TensorField:
    """S1_ab = 1/2 |grad u|^2 delta_ab - <grad_a u, grad_b u>, traceless in
    2-D, identically zero on conformal maps. The reference field is
    -<Delta u + A(u)(grad u, grad u), grad_b u>."""
    jac = jacobian(u)
    s = _first_stress(u, jac)
    div = _tensor_divergence(u.grid, s)
    el = laplacian(u) + gradient_squared(u)[..., None] * u.values
    ref = -np.einsum("ijk,ijak->ija", el, jac)
    return TensorField(components=s, divergence=div, reference=ref)


def stress_energy_2(u: MapField, eps: float) -> TensorField:
    """Combined tensor S1 - eps S2 with S2 the fourth-order stress tensor;
    divergence should match <grad_b u, (eps Delta^2 - Delta) u> on smooth
    fields up to O(h^2). At eps = 0 this reduces to the S1 data bit-exactly.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    jac = jacobian(u)
    s1 = _first_stress(u, jac)
    lap = laplacian(u)
    if eps == 0.0:
        combined = s1
    else:
        jlap = np.empty_like(jac)
        jlap[:, :, 0] = _central_diff(u.grid, lap, 0)
        jlap[:, :, 1] = _central_diff(u.grid, lap, 1)
        lap_sq = np.einsum("ijk,ijk->ij", lap, lap)
        mixed = np.einsum("ijak,ijak->ij", jac, jlap)
        s2 = np.empty_like(s1)
        for a in (0, 1):
            for b in (0, 1):
                s2[..., a, b] = -(np.einsum("ijk,ijk->ij", jac[:, :, a], jlap[:, :, b])
                                  + np.einsum("ijk,ijk->ij", jac[:, :, b], jlap[:, :, a]))
            s2[..., a, a] += 0.5 * lap_sq + mixed
        combined = s1 - eps * s2
    div = _tensor_divergence(u.grid, combined)
    rhs = eps * laplacian_array(u.grid, lap) - lap if eps != 0.0 else -lap
    ref = np.einsum("ijk,ijak->ija", rhs, jac)
    return TensorField(components=combined, divergence=div, reference=ref)


def mapping_degree(u: MapField) -> float:
    """Discrete topological degree (1 / 4 pi) integral <u, d1 u x d2 u> for
    S^2 targets; near-integer on well-resolved fields."""
    if u.target.ambient_dim != 3:
        raise ValueError("degree needs an S^2 target")
    jac = jacobian(u)
    cross = np.cross(jac[:, :, 0], jac[:, :, 1])
    dens = np.einsum("ijk,ijk->ij", u.values, cross)
    from .grid import integrate
    return integrate(u.grid, dens) / (4.0 * math.pi)


# ---------------------------------------------------------------------------
# energy ledger


@dataclass
class EnergyLedger:
    """Bookkeeping of the energy identity at one continuation stage.

    For alpha runs the identity parts are alpha-excess integrals
    ((1+q)^alpha - 1 over each region) so that
    total = volume + body + neck + bubble_total + discrepancy holds as a
    pure partition statement. For biharmonic runs the parts carry the full
    density q + eps |Delta u|^2 and the volume term is absent:
    total = body + neck + bubble_total + discrepancy.
    Dirichlet-only splits are reported alongside for both families.
    """

    kind: str
    param: float
    total: float
    volume: float
    body: float
    neck: float
    bubble_total: float
    discrepancy: float
    dirichlet_total: float
    body_dirichlet: float
    neck_dirichlet: float
    bubble_dirichlet: float
    bubbles: list
    neck_monitor: list          # (radius, dyadic annulus Dirichlet energy)
    neck_dyadic_max: float
    delta: float
    config: dict
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "kind", "param", "total", "volume", "body", "neck", "bubble_total",
            "discrepancy", "dirichlet_total", "body_dirichlet", "neck_dirichlet",
            "bubble_dirichlet", "neck_dyadic_max", "delta")}
        d = {k: (float(v) if isinstance(v, (int, float, np.floating)) else v)
             for k, v in d.items()}
        d["bubbles"] = [b.to_dict() for b in self.bubbles]
        d["neck_monitor"] = [[float(r), float(e)] for r, e in self.neck_monitor]
        d["config"] = self.config
        d["warnings"] = list(self.warnings)
        return d


def energy_ledger(u: MapField, kind: str, param: float,
                  bubbles: list[BubbleRecord], cfg: AnalysisConfig) -> EnergyLedger:
    """Partition the domain into bubble windows, neck annuli and body, and
    account the stage energy over the parts.

    Overlapping bubble windows are merged into a single region with a
    warning; windows larger than the outer radius are capped there.
    """
    grid = u.grid
    warnings: list[str] = []
    q = face_density(u)
    window_mask = np.zeros(grid.shape, dtype=bool)
    outer_mask = np.zeros(grid.shape, dtype=bool)
    overlap = False
    for rec in bubbles:
        m = ball_mask(grid, rec.center, rec.window_radius)
        if np.any(window_mask & m):
            overlap = True
        window_mask |= m
        outer_mask |= ball_mask(grid, rec.center, cfg.outer_radius)
        if rec.window_capped:
            warnings.append(f"window at {rec.center} capped at outer radius")
    if overlap:
        warnings.append("overlapping bubble windows merged")
    neck_mask = outer_mask & ~window_mask
    body_mask = ~outer_mask

    if kind == "alpha":
        ident = np.expm1(param * np.log1p(q))   # (1+q)^alpha - 1
    elif kind in ("eps", "biharmonic"):
        kind = "biharmonic"
        lap_sq = _kernels.squared_norm_field(laplacian(u))
        ident = q + param * lap_sq
    else:
        raise ValueError(f"unknown ledger kind {kind!r}")

    area = grid.cell_area
    body = masked_sum(ident, body_mask) * area
    neck = masked_sum(ident, neck_mask) * area
    bubble_total = masked_sum(ident, window_mask) * area
    total_ident = masked_sum(ident, np.ones(grid.shape, dtype=bool)) * area
    vol = grid.volume
    total = (vol + total_ident) if kind == "alpha" else total_ident
    discrepancy = total_ident - (body + neck + bubble_total)

    body_d = masked_sum(q, body_mask) * area
    neck_d = masked_sum(q, neck_mask) * area
    bubble_d = masked_sum(q, window_mask) * area
    diri_total = masked_sum(q, np.ones(grid.shape, dtype=bool)) * area

    monitor: list[tuple[float, float]] = []
    if bubbles:
        rec = max(bubbles, key=lambda b: b.conc_value)
        r = rec.window_radius
        while 2.0 * r <= cfg.outer_radius * (1.0 + 1e-12):
            ring_mask = ball_mask(grid, rec.center, 2.0 * r) & ~ball_mask(grid, rec.center, r)
            monitor.append((r, masked_sum(q, ring_mask) * area))
            r *= 2.0
    dyadic_max = max((e for _, e in monitor), default=0.0)

    return EnergyLedger(
        kind=kind, param=param, total=total, volume=vol, body=body, neck=neck,
        bubble_total=bubble_total, discrepancy=discrepancy,
        dirichlet_total=diri_total, body_dirichlet=body_d,
        neck_dirichlet=neck_d, bubble_dirichlet=bubble_d,
        bubbles=list(bubbles), neck_monitor=monitor, neck_dyadic_max=dyadic_max,
        delta=cfg.delta,
        config={"eps0": cfg.eps0, "delta": cfg.delta,
                "inner_factor": cfg.inner_factor, "outer_radius": cfg.outer_radius},
        warnings=warnings,
    )
