"""Exploration run for the degree-1 torus continuation experiment.

Prints per-stage energies, detection radii, exponents and neck ratios so the
preset constants (initializer scale, iteration budgets, analysis window) can
be frozen against measured behavior.
"""

import argparse
import math
import time

import numpy as np

from bubblelab import DomainGrid, Sphere
from bubblelab.bubbles import AnalysisConfig, UnderResolvedBubbleError, detect_bubbles, energy_ledger, mapping_degree
from bubblelab.descent import ContinuationSchedule, OptimizerConfig, continuation_run
from bubblelab.fields import planted_bubble

parser = argparse.ArgumentParser()
parser.add_argument("--nx", type=int, default=256)
parser.add_argument("--scale", type=float, default=0.08)
parser.add_argument("--iters", type=int, default=3000)
parser.add_argument("--eps0", type=float, default=16.0)
parser.add_argument("--factor", type=float, default=7.0)
parser.add_argument("--params", type=float, nargs="*", default=[1.2, 1.1, 1.05, 1.02, 1.01])
parser.add_argument("--kind", default="alpha")
parser.add_argument("--step-init", type=float, default=1e-4)
args = parser.parse_args()

grid = DomainGrid(args.nx, args.nx)
target = Sphere(2)
u0 = planted_bubble(grid, target, args.scale)
acfg = AnalysisConfig(eps0=args.eps0, inner_factor=args.factor, outer_radius=0.25)
sched = ContinuationSchedule(kind=args.kind, params=tuple(args.params),
                             max_iters=tuple([args.iters] * len(args.params)))
ocfg = OptimizerConfig(tol=1e-8, step_init=args.step_init)

print(f"grid {args.nx}^2, scale {args.scale}, iters/stage {args.iters}, "
      f"eps0 {args.eps0}, factor {args.factor}, kind {args.kind}")
t0 = time.time()


def hook(stage):
    out = {}
    alpha = stage.param if stage.kind == "alpha" else None
    eps = stage.param if stage.kind != "alpha" else None
    try:
        bubbles = detect_bubbles(stage.field, acfg, alpha=alpha, eps=eps, max_count=2)
    except UnderResolvedBubbleError as err:
        print(f"  stage {stage.index}: under-resolved: {err}")
        bubbles = []
    led = energy_ledger(stage.field, stage.kind, stage.param, bubbles, acfg)
    deg = mapping_degree(stage.field)
    b = stage.breakdown
    excess = b.total - b.volume
    line = (f"  stage {stage.index} p={stage.param:g}: it={stage.iterations} "
            f"conv={stage.converged} E={b.total:.4f} E-vol={excess:.4f} "
            f"diri={b.dirichlet:.4f} ent={stage.entropy:.4f} deg={deg:.3f} gnorm={stage.grad_norm:.2e}")
    if bubbles:
        rec = bubbles[0]
        scale_est = rec.radius / 0.683 if args.eps0 == 16.0 else rec.radius
        neck_ratio = led.neck_dirichlet / max(led.bubble_dirichlet, 1e-30)
        line += (f" r_k={rec.radius:.4f} (~{rec.radius/grid.h:.1f}h) w={rec.window_radius:.3f}"
                 f"{' CAP' if rec.window_capped else ''} exp={rec.exponent if rec.exponent else rec.eps_ratio:.5f}"
                 f" neck/bub={neck_ratio:.4f} body_d={led.body_dirichlet:.4f} nbub={len(bubbles)}")
    print(line, flush=True)
    return out


stages = continuation_run(u0, sched, ocfg, stage_hook=hook)
print(f"total {time.time()-t0:.1f}s")
final = stages[-1].breakdown
print(f"final E-vol={final.total-final.volume:.4f} vs 8pi={8*math.pi:.4f} "
      f"rel={(final.total-final.volume-8*math.pi)/(8*math.pi)*100:.2f}%")
