"""Experiment drivers: build the configured run, execute it, emit artifacts.

Exit status convention: 0 full success (iteration-budget warnings included),
2 partial results written after a stage-level failure, 1 hard error.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .bubbles import (AnalysisConfig, UnderResolvedBubbleError, annulus_profile,
                      detect_bubbles, energy_ledger, mapping_degree)
from .config import ExperimentConfig, serialize_config
from .descent import ContinuationSchedule, OptimizerConfig, StepBlowupError, continuation_run
from .energies import make_functional
from .fields import constant_map, great_circle_wrap, planted_bubble
from .fileio import write_csv, write_field, write_json
from .grid import DomainGrid, MapField
from .sphere import Sphere
from .sweepout import (DeformConfig, beta_estimate, entropy_derivative_check,
                       perturbed_latitude_family, sup_energy)

logger = logging.getLogger("bubblelab")


def build_grid(cfg: ExperimentConfig) -> DomainGrid:
    return DomainGrid(cfg.nx, cfg.ny, lx=cfg.lx)


def build_initializer(cfg: ExperimentConfig) -> MapField:
    grid = build_grid(cfg)
    target = Sphere(cfg.target_dim)
    if cfg.initializer == "constant":
        return constant_map(grid, target)
    if cfg.initializer == "wrap":
        return great_circle_wrap(grid, target)
    if cfg.initializer == "bubble":
        return planted_bubble(grid, target, cfg.bubble_scale,
                              pure_radius=cfg.pure_radius,
                              outer_radius=cfg.outer_blend)
    raise ValueError(f"unknown initializer {cfg.initializer!r}")


def analysis_config(cfg: ExperimentConfig) -> AnalysisConfig:
    return AnalysisConfig(eps0=cfg.eps0, delta=cfg.delta,
                          inner_factor=cfg.inner_factor,
                          outer_radius=cfg.outer_radius,
                          rescale_nodes=cfg.rescale_nodes)


def analyze_stage(u: MapField, kind: str, param: float, acfg: AnalysisConfig) -> dict:
    """Bubble detection plus ledger for one stage; detection failures are
    reported, not fatal."""
    out: dict = {"bubbles": [], "ledger": None, "warning": None}
    alpha = param if kind == "alpha" else None
    eps = param if kind != "alpha" else None
    try:
        bubbles = detect_bubbles(u, acfg, alpha=alpha, eps=eps)
    except UnderResolvedBubbleError as err:
        out["warning"] = str(err)
        bubbles = []
    out["bubbles"] = bubbles
    out["ledger"] = energy_ledger(u, kind, param, bubbles, acfg)
    if u.target.ambient_dim == 3 and u.grid.ny > 1:
        out["degree"] = mapping_degree(u)
    return out


def _stage_record(stage, extra: dict) -> dict:
    b = stage.breakdown
    rec = {
        "index": stage.index,
        "kind": stage.kind,
        "param": stage.param,
        "energy_total": b.total,
        "energy_dirichlet": b.dirichlet,
        "energy_regularizer": b.regularizer,
        "energy_volume": b.volume,
        "entropy": stage.entropy,
        "el_residual": stage.el_residual,
        "grad_norm": stage.grad_norm,
        "converged": stage.converged,
        "iterations": stage.iterations,
        "warning": stage.warning,
    }
    if "degree" in extra:
        rec["degree"] = extra["degree"]
    if extra.get("warning"):
        rec["analysis_warning"] = extra["warning"]
    bubbles = extra.get("bubbles") or []
    rec["bubbles"] = [x.to_dict() for x in bubbles]
    if bubbles:
        rec["bubble_radius"] = bubbles[0].radius
        if stage.kind == "alpha":
            rec["exponent"] = bubbles[0].exponent
        else:
            rec["eps_ratio"] = bubbles[0].eps_ratio
    return rec


def run_continuation_experiment(cfg: ExperimentConfig, outdir: Path) -> int:
    acfg = analysis_config(cfg)
    u0 = build_initializer(cfg)
    status = 0

    if not cfg.params:
        # analysis-only preset: diagnostics of the initializer field itself
        extra = analyze_stage(u0, cfg.kind, cfg.analysis_alpha, acfg)
        func = make_functional(cfg.kind, cfg.analysis_alpha)
        b = func.breakdown(u0)
        rec = {
            "index": 0, "kind": cfg.kind, "param": cfg.analysis_alpha,
            "energy_total": b.total, "energy_dirichlet": b.dirichlet,
            "energy_regularizer": b.regularizer, "energy_volume": b.volume,
            "entropy": func.entropy(u0), "el_residual": func.el_residual(u0),
            "grad_norm": float(np.sqrt((func.descent(u0) ** 2).sum(-1).max())),
            "converged": None, "iterations": 0, "warning": None,
            "bubbles": [x.to_dict() for x in extra["bubbles"]],
        }
        if "degree" in extra:
            rec["degree"] = extra["degree"]
        if extra["bubbles"]:
            rec["exponent"] = extra["bubbles"][0].exponent
        _write_stage_artifacts(cfg, outdir, [rec], [extra], [u0])
        return status

    schedule = ContinuationSchedule(kind=cfg.kind, params=cfg.params,
                                    max_iters=cfg.stage_max_iters or None)
    ocfg = OptimizerConfig(tol=cfg.tol, max_iter=cfg.max_iter, step_init=cfg.step_init)
    hook = lambda stage: analyze_stage(stage.field, stage.kind, stage.param, acfg)
    try:
        stages = continuation_run(u0, schedule, ocfg, stage_hook=hook)
    except StepBlowupError as err:
        logger.error("stage %s blew up: %s", getattr(err, "stage_index", "?"), err)
        write_field(outdir / "last_valid.blf", err.last_field)
        return 2

    records = [_stage_record(s, s.extra) for s in stages]
    extras = [s.extra for s in stages]
    fieldlist = [s.field for s in stages]
    _write_stage_artifacts(cfg, outdir, records, extras, fieldlist, stages)
    return status


def _write_stage_artifacts(cfg, outdir: Path, records, extras, fieldlist, stages=None):
    write_json(outdir / "stages.json", records)
    write_json(outdir / "ledger.json",
               [e["ledger"].to_dict() for e in extras if e.get("ledger") is not None])
    bubbles = []
    for k, e in enumerate(extras):
        for x in e.get("bubbles") or []:
            d = x.to_dict()
            d["stage"] = k
            bubbles.append(d)
    write_json(outdir / "bubbles.json", bubbles)

    rows = []
    if stages is not None:
        for s in stages:
            for i, (en, gn, st) in enumerate(zip(s.trace.energy, s.trace.grad_norm, s.trace.step)):
                rows.append((s.index, i, en, gn, st))
    write_csv(outdir / "trace.csv",
              ["stage", "iteration", "energy", "grad_norm", "step"], rows)

    # neck profile of the last stage holding a detected bubble
    neck_rows = []
    for k in range(len(extras) - 1, -1, -1):
        recs = extras[k].get("bubbles") or []
        if recs:
            u = fieldlist[k]
            rec = recs[0]
            r1 = max(rec.window_radius, 2.0 * u.grid.h * 1.001)
            if r1 < cfg.outer_radius:
                prof = annulus_profile(u, rec.center, r1, cfg.outer_radius)
                for bi, band in enumerate(prof.bands):
                    neck_rows.append((k, bi, band.r_in, band.r_out,
                                      band.radial, band.tangential, band.total))
            break
    write_csv(outdir / "neck.csv",
              ["stage", "band", "r_in", "r_out", "radial", "tangential", "total"],
              neck_rows)

    write_field(outdir / "final_field.blf", fieldlist[-1])


def run_minmax_experiment(cfg: ExperimentConfig, outdir: Path) -> int:
    dcfg = DeformConfig(sweep_budget=cfg.sweep_budget, step_init=cfg.deform_step)
    gen = lambda rs: perturbed_latitude_family(
        cfg.minmax_nx, cfg.family_size,
        seed=cfg.seed * 1000 + rs,
        amplitude=0.0 if rs == 0 else cfg.perturb_amplitude)
    result = beta_estimate(gen, cfg.minmax_alphas, restarts=cfg.restarts, cfg=dcfg)
    report = entropy_derivative_check(result)
    rows = [(a, b, db, pr) for a, b, db, pr in
            zip(report.alphas, result.betas, report.dbeta, report.entropy_product)]
    write_csv(outdir / "beta.csv",
              ["alpha", "beta", "dbeta_dalpha", "entropy_product"], rows)
    write_json(outdir / "minmax.json", {
        "alphas": [float(a) for a in result.alphas],
        "betas": [float(b) for b in result.betas],
        "volume": float(result.sup_members[0].grid.volume),
        "sweeps": [int(s) for s in result.sweeps],
        "argmax_indices": [int(i) for i in result.argmax_indices],
        "dbeta_dalpha": [float(x) for x in report.dbeta],
        "entropy_product": [float(x) for x in report.entropy_product],
        "step1_satisfied": [bool(x) for x in report.step1_satisfied],
        "energy_derivative": [float(x) for x in report.energy_derivative],
    })
    for i, m in enumerate(result.sup_members):
        write_field(outdir / f"sup_member_{i}.blf", m)
    return 0


def run_experiment(cfg: ExperimentConfig, outdir) -> int:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.txt").write_text(serialize_config(cfg))
    if cfg.preset == "geodesic-sweepout":
        return run_minmax_experiment(cfg, outdir)
    return run_continuation_experiment(cfg, outdir)


def run_analysis(field_path, cfg: ExperimentConfig, outdir) -> int:
    """Re-run bubble analysis on a stored field."""
    from .fileio import read_field
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    u = read_field(field_path)
    acfg = analysis_config(cfg)
    param = cfg.analysis_alpha if cfg.kind == "alpha" else (cfg.params[-1] if cfg.params else 0.0)
    extra = analyze_stage(u, cfg.kind, param, acfg)
    write_json(outdir / "ledger.json", [extra["ledger"].to_dict()])
    write_json(outdir / "bubbles.json", [x.to_dict() for x in extra["bubbles"]])
    neck_rows = []
    if extra["bubbles"]:
        rec = extra["bubbles"][0]
        r1 = max(rec.window_radius, 2.0 * u.grid.h * 1.001)
        if r1 < acfg.outer_radius:
            prof = annulus_profile(u, rec.center, r1, acfg.outer_radius)
            for bi, band in enumerate(prof.bands):
                neck_rows.append((0, bi, band.r_in, band.r_out,
                                  band.radial, band.tangential, band.total))
    write_csv(outdir / "neck.csv",
              ["stage", "band", "r_in", "r_out", "radial", "tangential", "total"],
              neck_rows)
    return 0
