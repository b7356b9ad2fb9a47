"""Command-line entry point: run, sweep, validate, preset."""
from __future__ import annotations

import argparse
import shutil
import sys
from dataclasses import replace
from pathlib import Path

from .config import ScenarioConfig, load_config
from .errors import SimulationError
from .harness import (execute, figspec_paths, load_preset, preset_names,
                      preset_path, report_text, summarize, validate_scenario)


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    sim = cfg.sim
    if args.seed is not None:
        sim = replace(sim, master_seed=args.seed)
    if args.replications is not None:
        sim = replace(sim, replications=args.replications)
    if args.horizon is not None:
        sim = replace(sim, horizon=args.horizon)
    return replace(cfg, sim=sim)


def _load(args) -> ScenarioConfig:
    return _apply_overrides(load_config(args.config), args)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("config", help="scenario config file (YAML)")
    p.add_argument("--seed", type=int, default=None, help="override sim.master_seed")
    p.add_argument("--replications", type=int, default=None, help="override sim.replications")
    p.add_argument("--horizon", type=float, default=None, help="override sim.horizon")
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdcsim",
        description="Discrete-event simulator for spine-leaf quantum data center networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario (expands sweep grids if present)")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep and write a long-form CSV")
    _add_common(p_sweep)

    p_val = sub.add_parser("validate", help="compare a single-leaf run against the exact chain")
    _add_common(p_val)
    p_val.add_argument("--tolerance", type=float, default=0.02, help="pass/fail tolerance")

    p_preset = sub.add_parser("preset", help="export a shipped scenario preset (and its figure specs)")
    p_preset.add_argument("name", nargs="?", default=None, help="preset name; omit to list")
    p_preset.add_argument("--out", default=".", help="destination directory")
    return parser


def _cmd_run(args) -> int:
    cfg = _load(args)
    results = execute(cfg, out=args.out, workers=args.workers)
    print(summarize(results))
    if args.out:
        print(f"wrote {len(results)} rows to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    cfg = _load(args)
    report = validate_scenario(cfg, tolerance=args.tolerance)
    print(report_text(report))
    return 0 if report.passed else 1


def _cmd_preset(args) -> int:
    if args.name is None:
        print("\n".join(preset_names()))
        return 0
    dest = Path(args.out)
    dest.mkdir(parents=True, exist_ok=True)
    src = preset_path(args.name)
    target = dest / src.name
    with src.open("rb") as fh_in, open(target, "wb") as fh_out:
        shutil.copyfileobj(fh_in, fh_out)
    written = [target]
    for spec in figspec_paths(args.name):
        spec_target = dest / spec.name
        with spec.open("rb") as fh_in, open(spec_target, "wb") as fh_out:
            shutil.copyfileobj(fh_in, fh_out)
        written.append(spec_target)
    for path in written:
        print(path)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("run", "sweep"):
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_preset(args)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
