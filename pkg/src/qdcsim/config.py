"""Scenario configuration: YAML parsing, validation, and sweep-grid expansion.

Sweep grids are dotted paths (e.g. physics.gamma) mapped to value lists; they
expand as a full Cartesian product in file order. Parse -> serialize -> parse is
the identity.
"""
from __future__ import annotations

import copy
import itertools
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import yaml

from .errors import ConfigError
from .leaf import FULL_POLICIES, LeafConfig, POP_POLICIES, RENEGE_DISTS
from .network import Workload

MAX_SWEEP_POINTS = 10_000
DEFAULT_HORIZON = 10_000.0


@dataclass(frozen=True)
class TopologyConfig:
    spines: int
    leaves: int
    hosts_per_leaf: int


@dataclass(frozen=True)
class PhysicsConfig:
    gamma: float | list[float]
    f_threshold: float
    q_bsm: float = 1.0

    def gamma_for_leaf(self, leaf: int) -> float:
        if isinstance(self.gamma, list):
            return self.gamma[leaf]
        return self.gamma

    def gammas(self, n_leaves: int) -> tuple[float, ...]:
        if isinstance(self.gamma, list):
            return tuple(self.gamma)
        return (self.gamma,) * n_leaves


@dataclass(frozen=True)
class SimConfig:
    horizon: float = DEFAULT_HORIZON
    warmup_fraction: float = 0.1
    master_seed: int = 1
    replications: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    topology: TopologyConfig
    physics: PhysicsConfig
    leaf: LeafConfig
    workload: Workload
    sim: SimConfig = field(default_factory=SimConfig)
    sweep: dict[str, list] | None = None

    def to_dict(self) -> dict:
        d = {
            "topology": asdict(self.topology),
            "physics": asdict(self.physics),
            "leaf": asdict(self.leaf),
            "workload": {k: v for k, v in asdict(self.workload).items() if v is not None},
            "sim": asdict(self.sim),
        }
        if self.sweep:
            d["sweep"] = copy.deepcopy(self.sweep)
        return d


_SECTIONS = {"topology", "physics", "leaf", "workload", "sim", "sweep"}


def config_from_dict(data: dict) -> ScenarioConfig:
    violations = []
    if not isinstance(data, dict):
        raise ConfigError(["config root must be a mapping"])
    unknown = set(data) - _SECTIONS
    for name in sorted(unknown):
        violations.append(f"{name}: unknown section")
    for required in ("topology", "physics", "leaf", "workload"):
        if required not in data:
            violations.append(f"{required}: section missing")
    if violations:
        raise ConfigError(violations)

    def build(section: str, cls, **defaults):
        raw = dict(defaults)
        raw.update(data.get(section, {}))
        fields = {f for f in cls.__dataclass_fields__}
        for key in sorted(set(raw) - fields):
            violations.append(f"{section}.{key}: unknown field")
            raw.pop(key)
        try:
            return cls(**raw)
        except TypeError as exc:
            violations.append(f"{section}: {exc}")
        except ValueError as exc:
            violations.append(f"{section}: {exc}")
        return None

    top = build("topology", TopologyConfig)
    phys = build("physics", PhysicsConfig)
    leaf = build("leaf", LeafConfig)
    wl = build("workload", Workload)
    sim = build("sim", SimConfig)
    sweep = data.get("sweep") or None

    cfg = None
    if not violations:
        cfg = ScenarioConfig(top, phys, leaf, wl, sim, sweep)
        violations.extend(validate(cfg))
    if violations:
        raise ConfigError(violations)
    return cfg


def validate(cfg: ScenarioConfig) -> list[str]:
    """Every violated field, as one message each; empty when the config is sound."""
    v = []
    t = cfg.topology
    if t.leaves < 1:
        v.append(f"topology.leaves: must be >= 1, got {t.leaves}")
    if t.hosts_per_leaf < 2:
        v.append(f"topology.hosts_per_leaf: must be >= 2, got {t.hosts_per_leaf}")
    if t.spines < 0:
        v.append(f"topology.spines: must be >= 0, got {t.spines}")
    p = cfg.physics
    gammas = p.gamma if isinstance(p.gamma, list) else [p.gamma]
    if isinstance(p.gamma, list) and len(p.gamma) != t.leaves:
        v.append(f"physics.gamma: per-leaf list must have {t.leaves} entries, got {len(p.gamma)}")
    for g in gammas:
        if g < 0:
            v.append(f"physics.gamma: must be >= 0, got {g}")
            break
    if not 0.5 < p.f_threshold <= 1.0:
        v.append(f"physics.f_threshold: must be in (0.5, 1], got {p.f_threshold}")
    if not 0.0 <= p.q_bsm <= 1.0:
        v.append(f"physics.q_bsm: must be in [0, 1], got {p.q_bsm}")
    w = cfg.workload
    needs_spine = (w.mode == "aggregate" and (w.p_inter or 0) > 0) or \
        (w.mode == "per-pair" and t.leaves > 1)
    if needs_spine and t.spines == 0:
        v.append("topology.spines: inter-cluster demand possible but no spine present")
    if w.mode == "aggregate" and (w.p_inter or 0) > 0 and t.leaves < 2:
        v.append("workload.p_inter: > 0 requires at least 2 leaves")
    s = cfg.sim
    if s.horizon <= 0:
        v.append(f"sim.horizon: must be > 0, got {s.horizon}")
    if not 0.0 <= s.warmup_fraction < 1.0:
        v.append(f"sim.warmup_fraction: must be in [0, 1), got {s.warmup_fraction}")
    if s.replications < 1:
        v.append(f"sim.replications: must be >= 1, got {s.replications}")
    if cfg.sweep:
        size = 1
        for path, values in cfg.sweep.items():
            if not isinstance(values, list) or not values:
                v.append(f"sweep.{path}: must be a non-empty list")
                continue
            section = path.split(".", 1)[0]
            if section not in ("topology", "physics", "leaf", "workload", "sim"):
                v.append(f"sweep.{path}: unknown section")
            size *= len(values)
        if size > MAX_SWEEP_POINTS:
            v.append(f"sweep: grid has {size} points, cap is {MAX_SWEEP_POINTS}")
    return v


def load_config(path: str) -> ScenarioConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return config_from_dict(data or {})


def dump_config(cfg: ScenarioConfig, path: str | None = None) -> str:
    text = yaml.safe_dump(cfg.to_dict(), sort_keys=False)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _with_value(cfg: ScenarioConfig, path: str, value: Any) -> ScenarioConfig:
    section_name, _, field_name = path.partition(".")
    section = getattr(cfg, section_name)
    if not field_name or field_name not in section.__dataclass_fields__:
        raise ConfigError([f"sweep.{path}: no such config field"])
    new_section = replace(section, **{field_name: value})
    return replace(cfg, **{section_name: new_section})


def expand_sweep(cfg: ScenarioConfig) -> list[tuple[dict[str, Any], ScenarioConfig]]:
    """Cartesian expansion of the sweep grids, in file order of the sweep keys.

    Returns (swept-values mapping, point config) per point; a config without
    grids expands to itself as the single point.
    """
    if not cfg.sweep:
        return [({}, replace(cfg, sweep=None))]
    paths = list(cfg.sweep)
    grids = [cfg.sweep[p] for p in paths]
    size = 1
    for g in grids:
        size *= len(g)
    if size > MAX_SWEEP_POINTS:
        raise ConfigError([f"sweep: grid has {size} points, cap is {MAX_SWEEP_POINTS}"])
    points = []
    for combo in itertools.product(*grids):
        point_cfg = replace(cfg, sweep=None)
        for path, value in zip(paths, combo):
            point_cfg = _with_value(point_cfg, path, value)
        errors = validate(point_cfg)
        if errors:
            raise ConfigError([f"sweep point {dict(zip(paths, combo))}: {e}" for e in errors])
        points.append((dict(zip(paths, combo)), point_cfg))
    return points
