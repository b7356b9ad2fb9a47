"""Sweep orchestration: point expansion, replication management, CSV rows, presets.

Replication r of every sweep point draws from streams seeded by (master_seed, r),
so points share arrival randomness (common random numbers) and trend comparisons
across points are variance-reduced.
"""
from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Any

from . import metrics as m
from .config import ScenarioConfig, config_from_dict, expand_sweep
from .errors import ConfigError, OracleModeError
from .metrics import RunStats, export_csv
from .oracle import BirthDeathChain, ComparisonReport, compare
from .physics import renege_time
from .sim import run_once
from .spine import successful_assembly_rate


@dataclass(frozen=True)
class PointResult:
    point: int
    replication: int
    swept: dict[str, Any]
    cfg: ScenarioConfig
    stats: RunStats
    row: dict[str, Any]


def config_columns(cfg: ScenarioConfig) -> dict[str, Any]:
    gamma = cfg.physics.gamma
    if isinstance(gamma, list):
        gamma = "|".join(str(g) for g in gamma)
    return {
        "master_seed": cfg.sim.master_seed,
        "spines": cfg.topology.spines,
        "leaves": cfg.topology.leaves,
        "hosts_per_leaf": cfg.topology.hosts_per_leaf,
        "gamma": gamma,
        "f_threshold": cfg.physics.f_threshold,
        "q_bsm": cfg.physics.q_bsm,
        "lambda_gen": cfg.leaf.lambda_gen,
        "queue_capacity": cfg.leaf.capacity,
        "full_policy": cfg.leaf.full_policy,
        "pop_policy": cfg.leaf.pop_policy,
        "renege_dist": cfg.leaf.renege_dist,
        "workload_mode": cfg.workload.mode,
        "mu_pair": cfg.workload.mu_pair,
        "mu_total": cfg.workload.mu_total,
        "p_inter": cfg.workload.p_inter,
        "horizon": cfg.sim.horizon,
        "warmup_fraction": cfg.sim.warmup_fraction,
    }


def result_row(point: int, replication: int, cfg: ScenarioConfig, stats: RunStats) -> dict[str, Any]:
    row = {"point": point, "replication": replication}
    row.update(config_columns(cfg))
    row.update({
        "generated": stats.leaf_sum("generated"),
        "not_joined": stats.leaf_sum("not_joined"),
        "displaced": stats.leaf_sum("displaced"),
        "admitted": stats.leaf_sum("admitted"),
        "reneged": stats.leaf_sum("reneged"),
        "delivered_intra": stats.leaf_sum("delivered_intra"),
        "sent_to_swap": stats.leaf_sum("sent_to_swap"),
        "in_memory_final": stats.leaf_sum("in_memory_final"),
        "requests_total": stats.requests_total,
        "requests_inter": stats.requests_inter,
        "delivered_inter": stats.delivered_inter,
        "unserved_intra": stats.leaf_sum("unserved_empty"),
        "unserved_inter": stats.unserved_inter_total,
        "swap_attempts": stats.spine_sum("swap_attempts"),
        "swap_failures": stats.spine_sum("swap_failures"),
        "swap_successes": stats.spine_sum("swap_successes"),
        "throughput": m.throughput(stats),
        "capacity": m.capacity(stats),
        "avg_queue_len": m.avg_queue_len(stats),
        "reneging_ratio": m.reneging_ratio(stats),
        "not_joined_ratio": m.not_joined_ratio(stats),
        "assembly_rate": successful_assembly_rate(stats),
    })
    for cls, suffix in ((None, ""), ("intra", "_intra"), ("inter", "_inter")):
        summary = m.fidelity_summary(stats, cls)
        row[f"fidelity_mean{suffix}"] = None if summary is None else summary.mean
        row[f"fidelity_min{suffix}"] = None if summary is None else summary.min
        row[f"fidelity_max{suffix}"] = None if summary is None else summary.max
    return row


def _run_job(job) -> PointResult:
    point, replication, swept, cfg = job
    stats = run_once(cfg, replication)
    return PointResult(point, replication, swept, cfg, stats, result_row(point, replication, cfg, stats))


def execute(cfg: ScenarioConfig, out: str | None = None, workers: int = 1) -> list[PointResult]:
    """Run every (sweep point, replication), optionally writing the long-form CSV.

    Results come back sorted by (point, replication) regardless of worker
    scheduling, so output is identical for any worker count.
    """
    points = expand_sweep(cfg)
    jobs = [
        (idx, rep, swept, point_cfg)
        for idx, (swept, point_cfg) in enumerate(points)
        for rep in range(cfg.sim.replications)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs, chunksize=4))
    else:
        results = [_run_job(job) for job in jobs]
    results.sort(key=lambda r: (r.point, r.replication))
    if out is not None:
        export_csv([r.row for r in results], out)
    return results


_SUMMARY_METRICS = ("throughput", "capacity", "avg_queue_len", "reneging_ratio",
                    "not_joined_ratio", "assembly_rate", "fidelity_mean")


def summarize(results: list[PointResult]) -> str:
    """Per-point mean +/- standard error across replications, as a text table."""
    by_point: dict[int, list[PointResult]] = {}
    for r in results:
        by_point.setdefault(r.point, []).append(r)
    lines = []
    for point, group in sorted(by_point.items()):
        swept = group[0].swept
        label = ", ".join(f"{k}={v}" for k, v in swept.items()) or "single point"
        lines.append(f"point {point}: {label}")
        for name in _SUMMARY_METRICS:
            values = [r.row[name] for r in group if r.row[name] is not None]
            if not values:
                continue
            mean = statistics.fmean(values)
            se = statistics.stdev(values) / math.sqrt(len(values)) if len(values) > 1 else 0.0
            lines.append(f"  {name:>18}: {mean:.6g} +/- {se:.2g}")
    return "\n".join(lines)


def oracle_chain_for(cfg: ScenarioConfig) -> BirthDeathChain:
    """The birth-death chain matching a single-leaf validation config."""
    from .network import build_topology

    top = build_topology(cfg.topology.spines, cfg.topology.leaves, cfg.topology.hosts_per_leaf)
    gamma = cfg.physics.gamma_for_leaf(0)
    t_renege = renege_time(cfg.physics.f_threshold, gamma)
    theta = 0.0 if math.isinf(t_renege) else 1.0 / t_renege
    return BirthDeathChain(
        arrival_rate=cfg.leaf.lambda_gen,
        service_rate=cfg.workload.aggregate_rate(top),
        renege_rate=theta,
        capacity=cfg.leaf.capacity,
    )


def validate_scenario(cfg: ScenarioConfig, tolerance: float = 0.02,
                      replication: int = 0) -> ComparisonReport:
    """Run one matched simulation and compare it against the exact chain."""
    if cfg.sweep:
        raise ConfigError(["validate: config must be a single point, not a sweep"])
    if cfg.topology.leaves != 1:
        raise OracleModeError("validate: oracle comparison requires a single-leaf topology")
    gamma = cfg.physics.gamma_for_leaf(0)
    if cfg.leaf.renege_dist == "deterministic" and gamma > 0:
        raise OracleModeError(
            "validate: deterministic reneging has no Markov oracle; "
            "set leaf.renege_dist to 'exponential' (or gamma to 0)"
        )
    stats = run_once(cfg, replication)
    return compare(oracle_chain_for(cfg), stats, tolerance)


def report_text(report: ComparisonReport) -> str:
    lines = [f"{'metric':>16}  {'oracle':>12}  {'simulated':>12}  {'rel err':>9}  result"]
    for row in report.metrics:
        rel = f"{row.rel_err:.4%}" if row.rel_err is not None else "n/a"
        lines.append(f"{row.name:>16}  {row.oracle:>12.6g}  {row.simulated:>12.6g}  "
                     f"{rel:>9}  {'pass' if row.passed else 'FAIL'}")
    lines.append(f"overall: {'pass' if report.passed else 'FAIL'} at {report.tolerance:.1%} tolerance")
    return "\n".join(lines)


def preset_names() -> list[str]:
    root = resources.files("qdcsim") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def preset_path(name: str):
    root = resources.files("qdcsim") / "presets"
    path = root / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError([f"unknown preset {name!r}; available: {', '.join(preset_names())}"])
    return path


def load_preset(name: str) -> ScenarioConfig:
    import yaml

    with preset_path(name).open() as fh:
        return config_from_dict(yaml.safe_load(fh))


def figspec_paths(name: str) -> list:
    """Shipped figure-spec files whose stem starts with the preset name."""
    root = resources.files("qdcsim") / "presets" / "figspecs"
    if not root.is_dir():
        return []
    return sorted((p for p in root.iterdir()
                   if p.name.endswith(".yaml") and p.name.startswith(name)),
                  key=lambda p: p.name)
