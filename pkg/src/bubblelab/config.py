"""Experiment configuration: a flat dataclass behind a line-oriented
``[section]`` / ``key = value`` file format. No nesting, so experiment
records stay diff-able. Parse errors name the offending line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace


class ConfigError(ValueError):
    def __init__(self, line_no: int, line: str, reason: str):
        super().__init__(f"line {line_no}: {reason}: {line!r}")
        self.line_no = line_no
        self.line = line


@dataclass(frozen=True)
class ExperimentConfig:
    # run
    preset: str = "constant-sanity"
    seed: int = 0
    # grid
    nx: int = 64
    ny: int = 64
    lx: float = 1.0
    target_dim: int = 2
    # schedule (empty params means analysis only, no optimization)
    kind: str = "alpha"
    params: tuple = (1.1,)
    stage_max_iters: tuple = ()
    # optimizer
    tol: float = 1e-8
    max_iter: int = 200_000
    step_init: float = 1e-3
    # initializer
    initializer: str = "constant"
    bubble_scale: float = 0.05
    pure_radius: float = 0.25
    outer_blend: float = 0.49
    # analysis
    eps0: float = 1.0
    delta: float = 0.1
    inner_factor: float = 4.0
    outer_radius: float = 0.25
    rescale_nodes: int = 128
    analysis_alpha: float = 1.0
    # minmax
    minmax_nx: int = 256
    family_size: int = 64
    minmax_alphas: tuple = (1.01, 1.02, 1.05, 1.1, 1.2, 1.3)
    restarts: int = 2
    sweep_budget: int = 400
    deform_step: float = 1e-3
    perturb_amplitude: float = 0.02


def _parse_int(s: str) -> int:
    return int(s)


def _parse_float(s: str) -> float:
    return float(s)


def _parse_str(s: str) -> str:
    return s


def _parse_floats(s: str) -> tuple:
    toks = [t for t in re.split(r"[,\s]+", s.strip()) if t]
    return tuple(float(t) for t in toks)


def _parse_ints(s: str) -> tuple:
    toks = [t for t in re.split(r"[,\s]+", s.strip()) if t]
    return tuple(int(t) for t in toks)


# section.key -> (attribute, parser)
SCHEMA = {
    "run.preset": ("preset", _parse_str),
    "run.seed": ("seed", _parse_int),
    "grid.nx": ("nx", _parse_int),
    "grid.ny": ("ny", _parse_int),
    "grid.lx": ("lx", _parse_float),
    "grid.target_dim": ("target_dim", _parse_int),
    "schedule.kind": ("kind", _parse_str),
    "schedule.params": ("params", _parse_floats),
    "schedule.max_iters": ("stage_max_iters", _parse_ints),
    "optimizer.tol": ("tol", _parse_float),
    "optimizer.max_iter": ("max_iter", _parse_int),
    "optimizer.step_init": ("step_init", _parse_float),
    "initializer.name": ("initializer", _parse_str),
    "initializer.scale": ("bubble_scale", _parse_float),
    "initializer.pure_radius": ("pure_radius", _parse_float),
    "initializer.outer_blend": ("outer_blend", _parse_float),
    "analysis.eps0": ("eps0", _parse_float),
    "analysis.delta": ("delta", _parse_float),
    "analysis.inner_factor": ("inner_factor", _parse_float),
    "analysis.outer_radius": ("outer_radius", _parse_float),
    "analysis.rescale_nodes": ("rescale_nodes", _parse_int),
    "analysis.alpha": ("analysis_alpha", _parse_float),
    "minmax.nx": ("minmax_nx", _parse_int),
    "minmax.family_size": ("family_size", _parse_int),
    "minmax.alphas": ("minmax_alphas", _parse_floats),
    "minmax.restarts": ("restarts", _parse_int),
    "minmax.sweep_budget": ("sweep_budget", _parse_int),
    "minmax.deform_step": ("deform_step", _parse_float),
    "minmax.perturb_amplitude": ("perturb_amplitude", _parse_float),
}

_ATTR_TO_KEY = {attr: key for key, (attr, _) in SCHEMA.items()}


def parse_config_text(text: str) -> dict:
    """Parse key = value lines under [section] headers into an attribute
    override dict. Raises ConfigError naming the offending line."""
    overrides: dict = {}
    section = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section:
                raise ConfigError(line_no, raw, "empty section name")
            continue
        if "=" not in line:
            raise ConfigError(line_no, raw, "expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if section is None:
            raise ConfigError(line_no, raw, "key before any [section]")
        full = f"{section}.{key}"
        if full not in SCHEMA:
            raise ConfigError(line_no, raw, f"unknown key {full!r}")
        attr, parser = SCHEMA[full]
        try:
            overrides[attr] = parser(value)
        except ValueError:
            raise ConfigError(line_no, raw, f"cannot parse value for {full!r}")
    return overrides


def load_config(path) -> dict:
    with open(path) as fh:
        return parse_config_text(fh.read())


def apply_overrides(cfg: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    return replace(cfg, **overrides)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Emit the config in the file format; re-parses to the same values."""
    by_section: dict = {}
    for f in fields(cfg):
        key = _ATTR_TO_KEY[f.name]
        section, name = key.split(".")
        val = getattr(cfg, f.name)
        if isinstance(val, tuple):
            text = " ".join(format(v, ".17g") if isinstance(v, float) else str(v)
                            for v in val)
        elif isinstance(val, float):
            text = format(val, ".17g")
        else:
            text = str(val)
        by_section.setdefault(section, []).append(f"{name} = {text}")
    blocks = []
    for section in ("run", "grid", "schedule", "optimizer", "initializer",
                    "analysis", "minmax"):
        if section in by_section:
            blocks.append(f"[{section}]")
            blocks.extend(by_section[section])
            blocks.append("")
    return "\n".join(blocks)
