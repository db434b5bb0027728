"""Projected gradient descent with Armijo backtracking and BB steps, plus
continuation schedules driving alpha down toward 1 or eps toward 0."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .energies import EnergyBreakdown, make_functional
from .grid import MapField


class StepBlowupError(RuntimeError):
    """Line search produced non-finite energy; carries the last valid iterate."""

    def __init__(self, message: str, last_field: MapField):
        super().__init__(message)
        self.last_field = last_field


@dataclass(frozen=True)
class OptimizerConfig:
    tol: float = 1e-8              # sup-norm tolerance on the projected descent field
    max_iter: int = 200_000
    armijo_c1: float = 1e-4
    backtrack: float = 0.5
    step_min: float = 1e-6         # BB safeguard interval
    step_max: float = 1e2
    step_init: float = 1e-3
    max_backtracks: int = 60

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtracking factor must be in (0, 1)")
        if not 0.0 < self.armijo_c1 < 1.0:
            raise ValueError("armijo_c1 must be in (0, 1)")


@dataclass
class RunTrace:
    """Per-iteration record of one minimize call."""

    energy: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    step: list = field(default_factory=list)
    wall: list = field(default_factory=list, repr=False)

    def append(self, energy: float, grad_norm: float, step: float) -> None:
        self.energy.append(energy)
        self.grad_norm.append(grad_norm)
        self.step.append(step)
        self.wall.append(time.monotonic())

    def __len__(self) -> int:
        return len(self.energy)


@dataclass
class MinimizeResult:
    field: MapField
    trace: RunTrace
    converged: bool
    iterations: int
    energy: float
    grad_norm: float
    warning: str | None = None


@dataclass(frozen=True)
class ContinuationSchedule:
    """Strictly decreasing alpha (toward 1) or eps (toward 0) stages."""

    kind: str                       # "alpha" or "eps"
    params: tuple
    max_iters: tuple | None = None  # optional per-stage max_iter override

    def __post_init__(self):
        if self.kind not in ("alpha", "eps"):
            raise ValueError("schedule kind must be 'alpha' or 'eps'")
        p = tuple(float(x) for x in self.params)
        if any(b >= a for a, b in zip(p, p[1:])):
            raise ValueError("schedule must be strictly decreasing")
        low = 1.0 if self.kind == "alpha" else 0.0
        if any(x <= low for x in p):
            raise ValueError(f"schedule entries must be > {low}")
        object.__setattr__(self, "params", p)
        if self.max_iters is not None and len(self.max_iters) != len(p):
            raise ValueError("max_iters must match schedule length")


@dataclass
class StageResult:
    index: int
    kind: str
    param: float
    field: MapField
    breakdown: EnergyBreakdown
    entropy: float
    el_residual: float
    grad_norm: float
    converged: bool
    iterations: int
    trace: RunTrace
    warning: str | None = None
    extra: dict = field(default_factory=dict)


def _sup_norm(arr: np.ndarray) -> float:
    return float(np.sqrt(_kernels.squared_norm_field(arr).max()))


def minimize(u0: MapField, functional, config: OptimizerConfig = OptimizerConfig()) -> MinimizeResult:
    """Armijo-safeguarded projected gradient descent.

    Each accepted step satisfies E(next) <= E(u) - c1 * t * ||descent||_{L2}^2
    measured after renormalization onto the target, so the energy trace is
    non-increasing. Step sizes start from a Barzilai-Borwein estimate clamped
    to [step_min, step_max]. Convergence is declared when the sup norm of the
    projected descent field drops below config.tol.
    """
    u = u0.copy()
    u.validate()
    meas = u.grid.cell_area
    energy = functional.energy(u)
    if not np.isfinite(energy):
        raise StepBlowupError("non-finite energy at the initial iterate", u)
    d = functional.descent(u)
    gnorm = _sup_norm(d)
    trace = RunTrace()
    trace.append(energy, gnorm, 0.0)

    step = config.step_init
    warning = None
    it = 0
    while it < config.max_iter:
        if gnorm <= config.tol:
            return MinimizeResult(u, trace, True, it, energy, gnorm, warning)
        it += 1
        dd = meas * float(np.vdot(d, d))  # ||descent||_{L2}^2 = -<grad E, descent>
        t = float(np.clip(step, config.step_min, config.step_max))
        accepted = False
        for _ in range(config.max_backtracks):
            trial_vals = u.values + t * d
            norms = np.sqrt(_kernels.squared_norm_field(trial_vals))
            if norms.min() <= 1e-12:
                t *= config.backtrack
                continue
            trial = MapField(u.grid, u.target, trial_vals / norms[..., None])
            e_trial = functional.energy(trial)
            if np.isfinite(e_trial) and e_trial <= energy - config.armijo_c1 * t * dd:
                accepted = True
                break
            t *= config.backtrack
        if not accepted:
            if not np.isfinite(e_trial):
                raise StepBlowupError(f"line search blew up at iteration {it}", u)
            warning = "line-search-stall"
            return MinimizeResult(u, trace, False, it, energy, gnorm, warning)

        s_arr = trial.values - u.values
        u = trial
        energy = e_trial
        d_new = functional.descent(u)
        y_arr = d - d_new  # = grad_new - grad_old
        sy = float(np.vdot(s_arr, y_arr))
        ss = float(np.vdot(s_arr, s_arr))
        step = ss / sy if sy > 0 and np.isfinite(sy) else t / config.backtrack
        d = d_new
        gnorm = _sup_norm(d)
        trace.append(energy, gnorm, t)

    warning = "max-iterations"
    return MinimizeResult(u, trace, False, it, energy, gnorm, warning)


def el_residual(u: MapField, functional) -> float:
    """Unprojected discrete Euler-Lagrange defect of the given functional."""
    return functional.el_residual(u)


def continuation_run(u0: MapField, schedule: ContinuationSchedule,
                     config: OptimizerConfig = OptimizerConfig(),
                     stage_hook=None) -> list[StageResult]:
    """Run the schedule, warm-starting each stage from the previous field.

    A stage that exhausts its iteration budget is recorded with a warning and
    the run continues; late stages near the singular limit are badly
    conditioned and partial data is still useful. ``stage_hook(stage)`` may
    attach diagnostics to ``stage.extra``.
    """
    u = u0
    results: list[StageResult] = []
    for k, p in enumerate(schedule.params):
        func = make_functional(schedule.kind, p)
        cfg = config
        if schedule.max_iters is not None:
            cfg = replace(config, max_iter=int(schedule.max_iters[k]))
        try:
            res = minimize(u, func, cfg)
        except StepBlowupError as err:
            err.stage_index = k
            raise
        stage = StageResult(
            index=k, kind=schedule.kind, param=p, field=res.field,
            breakdown=func.breakdown(res.field), entropy=func.entropy(res.field),
            el_residual=func.el_residual(res.field), grad_norm=res.grad_norm,
            converged=res.converged, iterations=res.iterations, trace=res.trace,
            warning=res.warning,
        )
        if stage_hook is not None:
            hooked = stage_hook(stage)
            if hooked:
                stage.extra.update(hooked)
        results.append(stage)
        u = res.field
    return results
