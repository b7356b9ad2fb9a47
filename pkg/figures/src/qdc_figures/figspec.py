"""Declarative figure specs: which CSV columns become axes, panels, and series."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml


class FigureError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    x_field: str
    y_field: str
    panel_field: str
    series_fields: list[str]
    output_path: str
    y_error_field: str | None = None
    base_dir: Path = field(default_factory=Path, compare=False)

    def resolve_csv(self) -> Path:
        return self._resolve(self.csv_path)

    def resolve_output(self) -> Path:
        return self._resolve(self.output_path)

    def _resolve(self, p: str) -> Path:
        path = Path(p)
        return path if path.is_absolute() else self.base_dir / path

    def named_fields(self) -> list[str]:
        fields = [self.x_field, self.y_field, self.panel_field, *self.series_fields]
        if self.y_error_field:
            fields.append(self.y_error_field)
        return fields


_REQUIRED = ("csv_path", "x_field", "y_field", "panel_field", "series_fields", "output_path")


def load_spec(path: str | Path) -> FigureSpec:
    """Read one spec from a YAML file; relative paths resolve against its directory."""
    path = Path(path)
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise FigureError(f"{path}: spec must be a mapping")
    missing = [k for k in _REQUIRED if k not in data]
    if missing:
        raise FigureError(f"{path}: missing fields: {', '.join(missing)}")
    unknown = set(data) - set(_REQUIRED) - {"y_error_field"}
    if unknown:
        raise FigureError(f"{path}: unknown fields: {', '.join(sorted(unknown))}")
    series = data["series_fields"]
    if not isinstance(series, list) or not series:
        raise FigureError(f"{path}: series_fields must be a non-empty list")
    return FigureSpec(
        csv_path=data["csv_path"],
        x_field=data["x_field"],
        y_field=data["y_field"],
        panel_field=data["panel_field"],
        series_fields=list(series),
        output_path=data["output_path"],
        y_error_field=data.get("y_error_field"),
        base_dir=path.parent,
    )
