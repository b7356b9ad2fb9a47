"""Render a FigureSpec against a sweep CSV: one panel per panel value, one line
per series combination, x sorted numerically. Replication rows sharing an x are
averaged; an explicit error column adds error bars. Rendering never touches the
input CSV and is deterministic for a given (CSV, spec) pair."""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .figspec import FigureError, FigureSpec  # noqa: E402


@dataclass(frozen=True)
class RenderResult:
    output_path: Path
    n_panels: int
    series_per_panel: dict[str, int]
    points: int


def _sort_key(value: str):
    try:
        return (0, float(value), "")
    except ValueError:
        return (1, 0.0, value)


def _read_rows(spec: FigureSpec) -> list[dict]:
    csv_path = spec.resolve_csv()
    if not csv_path.exists():
        raise FigureError(f"CSV not found: {csv_path}")
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [f for f in spec.named_fields() if f not in header]
        if missing:
            raise FigureError(f"{csv_path}: missing column(s): {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise FigureError(f"{csv_path}: no data rows")
    return rows


def render(spec: FigureSpec) -> RenderResult:
    rows = _read_rows(spec)

    # panel -> series key -> x -> [y...], plus parallel error samples
    panels: dict[str, dict[tuple, dict[str, list[float]]]] = defaultdict(
        lambda: defaultdict(lambda: defaultdict(list)))
    errors: dict[str, dict[tuple, dict[str, list[float]]]] = defaultdict(
        lambda: defaultdict(lambda: defaultdict(list)))
    points = 0
    for row in rows:
        y_raw = row[spec.y_field]
        if y_raw == "" or y_raw is None:
            continue  # metric absent for this run (e.g. no inter demand)
        panel = row[spec.panel_field]
        series = tuple(row[f] for f in spec.series_fields)
        x = row[spec.x_field]
        panels[panel][series][x].append(float(y_raw))
        if spec.y_error_field:
            e_raw = row[spec.y_error_field]
            if e_raw not in ("", None):
                errors[panel][series][x].append(float(e_raw))
        points += 1
    if points == 0:
        raise FigureError(f"column {spec.y_field!r} has no plottable values")

    panel_keys = sorted(panels, key=_sort_key)
    fig, axes = plt.subplots(
        1, len(panel_keys), figsize=(4.0 * len(panel_keys), 3.4),
        sharey=True, squeeze=False)
    series_per_panel = {}
    for ax, panel in zip(axes[0], panel_keys):
        series_map = panels[panel]
        series_keys = sorted(series_map, key=lambda s: tuple(_sort_key(v) for v in s))
        for series in series_keys:
            xs = sorted(series_map[series], key=_sort_key)
            x_vals = [float(x) for x in xs]
            y_vals = [sum(series_map[series][x]) / len(series_map[series][x]) for x in xs]
            label = ", ".join(f"{f}={v}" for f, v in zip(spec.series_fields, series))
            if spec.y_error_field:
                err = [sum(errors[panel][series][x]) / len(errors[panel][series][x])
                       if errors[panel][series][x] else 0.0 for x in xs]
                ax.errorbar(x_vals, y_vals, yerr=err, marker="o", capsize=2.5, label=label)
            else:
                ax.plot(x_vals, y_vals, marker="o", label=label)
        ax.set_title(f"{spec.panel_field} = {panel}")
        ax.set_xlabel(spec.x_field)
        ax.grid(True, alpha=0.3)
        series_per_panel[panel] = len(series_keys)
    axes[0][0].set_ylabel(spec.y_field)
    axes[0][-1].legend(fontsize=7)
    fig.tight_layout()

    out = spec.resolve_output()
    out.parent.mkdir(parents=True, exist_ok=True)
    # drop the library version string so output bytes depend only on (CSV, spec)
    fig.savefig(out, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return RenderResult(out, len(panel_keys), series_per_panel, points)
