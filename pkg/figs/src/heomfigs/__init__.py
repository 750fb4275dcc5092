"""Static figure renderer for heomfield CSV output.

Reads the CSV files the simulator CLI writes and renders steady-state
scans, population evolutions, and emission spectra as PNG and SVG pairs.
Everything drawn comes straight from the CSV values; no physics is
recomputed here.
"""

from .csvio import FigError, Table, read_table
from .figspec import FigureSpec, PanelSpec, list_shipped_specs, load_spec
from .render import build_figure, render

__all__ = [
    "FigError",
    "FigureSpec",
    "PanelSpec",
    "Table",
    "build_figure",
    "list_shipped_specs",
    "load_spec",
    "read_table",
    "render",
]

__version__ = "0.1.0"
