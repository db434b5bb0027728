"""Canonical experiment presets; each binds one acceptance experiment.

Numeric choices here (initializer scale, detection threshold, window factor,
iteration budgets) were fixed by the tuning runs in scripts/ and are echoed
into every report via config.txt and the ledger's config block.
"""

from __future__ import annotations

from .config import ExperimentConfig


def constant_sanity() -> ExperimentConfig:
    return ExperimentConfig(
        preset="constant-sanity",
        nx=64, ny=64,
        kind="alpha", params=(1.1,),
        initializer="constant",
        max_iter=100,
    )


def degree1_torus() -> ExperimentConfig:
    # 256^2 grid with the alpha ladder ending at 1.01; the detection
    # threshold and window factor keep the bubble window resolved and
    # inside the outer radius at the final stage.
    return ExperimentConfig(
        preset="degree1-torus",
        nx=256, ny=256,
        kind="alpha", params=(1.2, 1.1, 1.05, 1.02, 1.01),
        stage_max_iters=(1500, 1200, 1200, 1500, 2500),
        initializer="bubble", bubble_scale=0.08,
        tol=1e-8, step_init=1e-4,
        eps0=16.0, delta=0.1, inner_factor=7.0, outer_radius=0.25,
    )


def planted_bubble_analysis() -> ExperimentConfig:
    # Pure diagnostics of the analytic bubble, no optimization. The scale
    # and threshold keep the concentration radius above the 4h resolution
    # floor of the 256^2 grid.
    return ExperimentConfig(
        preset="planted-bubble",
        nx=256, ny=256,
        kind="alpha", params=(),
        initializer="bubble", bubble_scale=0.05,
        eps0=8.0, delta=0.1, inner_factor=4.0, outer_radius=0.25,
        analysis_alpha=1.05,
    )


def biharmonic_degree1() -> ExperimentConfig:
    return ExperimentConfig(
        preset="biharmonic-degree1",
        nx=256, ny=256,
        kind="eps", params=(1e-2, 1e-3, 1e-4, 1e-5),
        stage_max_iters=(400, 600, 1000, 1500),
        initializer="bubble", bubble_scale=0.06,
        tol=1e-8, step_init=1e-9,
        eps0=8.0, delta=0.1, inner_factor=7.0, outer_radius=0.25,
    )


def geodesic_sweepout() -> ExperimentConfig:
    return ExperimentConfig(
        preset="geodesic-sweepout",
        minmax_nx=256, family_size=64,
        minmax_alphas=(1.01, 1.02, 1.05, 1.1, 1.2, 1.3),
        restarts=2, sweep_budget=400,
    )


PRESETS = {
    "constant-sanity": constant_sanity,
    "degree1-torus": degree1_torus,
    "planted-bubble": planted_bubble_analysis,
    "biharmonic-degree1": biharmonic_degree1,
    "geodesic-sweepout": geodesic_sweepout,
}


def build_preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choices: {sorted(PRESETS)}")
    return PRESETS[name]()
