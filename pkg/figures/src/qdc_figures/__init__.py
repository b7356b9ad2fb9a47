"""qdc-figures: declarative multi-panel rendering of qdcsim sweep CSVs."""

from .figspec import FigureError, FigureSpec, load_spec
from .render import RenderResult, render

__version__ = "0.1.0"

__all__ = ["FigureError", "FigureSpec", "RenderResult", "load_spec", "render"]
