"""Desk-scale min-max machinery on discrete map families.

A PathFamily is a finite sweepout; the engine estimates the min-max level
beta_alpha = inf sup E_alpha by flowing family members down a cutoff
pseudo-gradient and taking the best sup over restarts. The deformation never
raises the sup (asserted per sweep), so the engine certifies upper bounds
and trends rather than the true inf sup.

The canonical instance is the circle-domain latitude sweepout of S^2, whose
min-max critical point is the equatorial closed geodesic with closed-form
energies: on the circumference-2pi domain the equator member has
E_alpha = 2 pi 2^alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energies import AlphaFunctional, alpha_energy_derivative
from .fields import fourier_map, latitude_circle, smoothstep_quintic
from .grid import DomainGrid, MapField
from .sphere import Sphere


class DeformationError(RuntimeError):
    """Pseudo-gradient sweep failed to find a non-increasing step."""


@dataclass
class PathFamily:
    """Finite one-parameter family of maps sharing one grid and target."""

    members: list

    def __post_init__(self):
        if not self.members:
            raise ValueError("family must be non-empty")
        g = self.members[0].grid
        t = self.members[0].target
        for m in self.members:
            if m.grid != g or m.target != t:
                raise ValueError("family members must share grid and target")

    @property
    def grid(self) -> DomainGrid:
        return self.members[0].grid

    @property
    def size(self) -> int:
        return len(self.members)

    def copy(self) -> "PathFamily":
        return PathFamily([m.copy() for m in self.members])


@dataclass(frozen=True)
class DeformConfig:
    sweep_budget: int = 400
    step_init: float = 1e-3
    band_fraction: float = 0.05    # cutoff band below the sup level
    sup_decrease_tol: float = 1e-10
    max_halvings: int = 30
    grow: float = 1.5


@dataclass
class MinMaxResult:
    alphas: np.ndarray
    betas: np.ndarray
    argmax_indices: list
    sup_members: list              # converged sup member per alpha
    sweeps: list
    sup_history: list = field(repr=False, default_factory=list)


def family_energies(family: PathFamily, alpha: float) -> np.ndarray:
    func = AlphaFunctional(alpha)
    return np.array([func.energy(m) for m in family.members])


def sup_energy(family: PathFamily, alpha: float) -> tuple[float, int]:
    """Max of E_alpha over the family; ties break to the lowest index."""
    e = family_energies(family, alpha)
    idx = int(np.argmax(e))
    return float(e[idx]), idx


def winding_number(member: MapField, min_horizontal: float = 0.3) -> int | None:
    """Discrete winding of the horizontal components around the vertical
    axis; None when the member comes closer than min_horizontal to a pole."""
    v = member.values[:, 0, :]
    horiz = np.hypot(v[:, 0], v[:, 1])
    if horiz.min() < min_horizontal:
        return None
    ang = np.arctan2(v[:, 1], v[:, 0])
    dd = np.diff(np.concatenate([ang, ang[:1]]))
    dd = (dd + math.pi) % (2.0 * math.pi) - math.pi
    return int(round(dd.sum() / (2.0 * math.pi)))


def pseudo_gradient_deform(family: PathFamily, alpha: float,
                           cfg: DeformConfig = DeformConfig()) -> tuple[PathFamily, dict]:
    """Flow family members down E_alpha with a cutoff near the sup level.

    Members inside the top band (width band_fraction of the family's energy
    spread) move by explicit Euler steps along the projected descent field,
    scaled by a quintic cutoff that is 1 at the sup level and 0 below the
    band. A sweep that would raise the sup is retried with half the step;
    after max_halvings the sweep fails hard. Stops when the sup decrease per
    sweep drops below sup_decrease_tol or the budget is exhausted.
    """
    fam = family.copy()
    func = AlphaFunctional(alpha)
    energies = family_energies(fam, alpha)
    history = [float(energies.max())]
    step = cfg.step_init
    sweeps = 0
    for sweeps in range(1, cfg.sweep_budget + 1):
        sup = float(energies.max())
        low = float(energies.min())
        band = max(cfg.band_fraction * (sup - low), 1e-30)
        cut = smoothstep_quintic((energies - (sup - band)) / band)
        active = [i for i in range(fam.size) if cut[i] > 0.0]
        descents = {i: func.descent(fam.members[i]) for i in active}
        if all(float(np.abs(d).max()) < 1e-15 for d in descents.values()):
            break
        accepted = False
        t = step
        for _ in range(cfg.max_halvings):
            trial_members = list(fam.members)
            trial_energies = energies.copy()
            ok = True
            for i in active:
                vals = fam.members[i].values + (t * cut[i]) * descents[i]
                norms = np.sqrt(np.einsum("ijk,ijk->ij", vals, vals))
                if norms.min() <= 1e-12:
                    ok = False
                    break
                m = MapField(fam.grid, fam.members[i].target, vals / norms[..., None])
                trial_members[i] = m
                trial_energies[i] = func.energy(m)
            if ok and np.isfinite(trial_energies).all() and trial_energies.max() <= sup:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            raise DeformationError(f"sweep {sweeps}: no admissible step after "
                                   f"{cfg.max_halvings} halvings")
        fam.members = trial_members
        energies = trial_energies
        new_sup = float(energies.max())
        if new_sup > sup:
            raise AssertionError("deformation raised the sup energy")
        history.append(new_sup)
        step = min(t * cfg.grow, 1e3)
        if sup - new_sup < cfg.sup_decrease_tol:
            break
    return fam, {"sweeps": sweeps, "sup_history": history}


def latitude_family(nx: int = 256, count: int = 64, turns: int = 1) -> PathFamily:
    """Sweepout of S^2 by latitude circles from pole to pole on the
    circumference-2pi circle domain."""
    grid = DomainGrid(nx, 1, lx=2.0 * math.pi, ly=1.0)
    target = Sphere(2)
    angles = np.linspace(0.0, math.pi, count)
    return PathFamily([latitude_circle(grid, target, a, turns=turns) for a in angles])


def perturbed_latitude_family(nx: int, count: int, seed: int,
                              amplitude: float = 0.02) -> PathFamily:
    """Latitude sweepout with a small seeded tangent perturbation, for
    restarts; endpoints stay at the poles."""
    fam = latitude_family(nx, count)
    if amplitude == 0.0:
        return fam
    rng = np.random.default_rng(seed)
    out = []
    for k, m in enumerate(fam.members):
        if k == 0 or k == len(fam.members) - 1:
            out.append(m)
            continue
        f = fourier_map(int(rng.integers(0, 2**31)), 3, max_mode=2, amplitude=amplitude)
        x, _ = m.grid.coords()
        raw = f(x[:, None] / m.grid.lx, np.zeros((1,)))
        vals = m.values + m.target.project_tangent(m.values, raw)
        out.append(MapField(m.grid, m.target, m.target.project_point(vals)))
    return PathFamily(out)


def beta_estimate(family_generator, alphas, restarts: int = 2,
                  cfg: DeformConfig = DeformConfig()) -> MinMaxResult:
    """Estimate beta_alpha over an alpha grid: for each alpha, deform
    ``restarts`` generated families and keep the smallest post-deformation
    sup. The resulting table must be non-decreasing in alpha (monotonicity
    of the integrand), which is checked here.
    """
    alphas = np.asarray(sorted(float(a) for a in alphas))
    betas = np.empty_like(alphas)
    argmax, members, sweeps, histories = [], [], [], []
    for i, a in enumerate(alphas):
        best = None
        for rs in range(restarts):
            fam = family_generator(rs)
            deformed, info = pseudo_gradient_deform(fam, a, cfg)
            val, idx = sup_energy(deformed, a)
            if best is None or val < best[0]:
                best = (val, idx, deformed.members[idx], info)
        betas[i] = best[0]
        argmax.append(best[1])
        members.append(best[2])
        sweeps.append(best[3]["sweeps"])
        histories.append(best[3]["sup_history"])
    if np.any(np.diff(betas) < -1e-9 * np.abs(betas[:-1])):
        raise AssertionError("beta table is not non-decreasing in alpha")
    return MinMaxResult(alphas=alphas, betas=betas, argmax_indices=argmax,
                        sup_members=members, sweeps=sweeps, sup_history=histories)


@dataclass(frozen=True)
class EntropyReport:
    alphas: np.ndarray
    dbeta: np.ndarray              # finite-difference derivative of beta
    entropy_product: np.ndarray    # (a-1) log(1/(a-1)) dbeta/dalpha
    energy_derivative: np.ndarray  # d_alpha E_alpha at the sup member
    step1_satisfied: np.ndarray    # energy_derivative <= dbeta + 3, interior
    interior: np.ndarray           # mask of interior grid points


def entropy_derivative_check(result: MinMaxResult) -> EntropyReport:
    """Finite-difference dbeta/dalpha diagnostics on a beta table.

    Interior points use centered secants on the (possibly non-uniform) alpha
    grid, endpoints one-sided secants. Reports the entropy product
    (alpha-1) log(1/(alpha-1)) dbeta/dalpha and checks the variational
    inequality d_alpha E_alpha(u_alpha) <= dbeta/dalpha + 3 at the deformed
    sup members.
    """
    a = result.alphas
    b = result.betas
    if a.size < 4:
        raise ValueError("need at least 4 alpha grid points")
    db = np.empty_like(a)
    db[0] = (b[1] - b[0]) / (a[1] - a[0])
    db[-1] = (b[-1] - b[-2]) / (a[-1] - a[-2])
    for i in range(1, a.size - 1):
        db[i] = (b[i + 1] - b[i - 1]) / (a[i + 1] - a[i - 1])
    with np.errstate(divide="ignore"):
        prod = (a - 1.0) * np.log(1.0 / (a - 1.0)) * db
    deriv = np.array([alpha_energy_derivative(m, float(al))
                      for m, al in zip(result.sup_members, a)])
    interior = np.zeros(a.size, dtype=bool)
    interior[1:-1] = True
    ok = deriv <= db + 3.0
    return EntropyReport(alphas=a, dbeta=db, entropy_product=prod,
                         energy_derivative=deriv, step1_satisfied=ok,
                         interior=interior)
