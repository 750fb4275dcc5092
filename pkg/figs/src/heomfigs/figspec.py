"""Declarative figure specifications.

A spec is a small TOML file naming the figure kind, the output stem, and
one table per panel with the CSV file the panel draws. The shipped specs
cover the six standard figure families; custom specs follow the same
shape.

Example::

    kind = "evolution"
    output = "population_vs_bath"

    [[panel]]
    csv = "evolution_vs_bath_cutoff.csv"
    title = "varying bath cutoff"
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .csvio import FigError

KINDS = ("steady_scan", "evolution", "spectrum")


@dataclass(frozen=True)
class PanelSpec:
    csv: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    overlay_csv: str = ""
    overlay_suffix: str = " (reference)"


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    output: str
    panels: tuple = ()
    title: str = ""
    series_labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigError(
                f"unknown figure kind '{self.kind}' "
                f"(expected one of: {', '.join(KINDS)})"
            )
        if not self.output:
            raise FigError("figure spec needs a non-empty 'output' stem")
        if not self.panels:
            raise FigError("figure spec needs at least one [[panel]] entry")
        for panel in self.panels:
            if not panel.csv:
                raise FigError("every [[panel]] entry needs a 'csv' file name")


_PANEL_KEYS = {"csv", "title", "xlabel", "ylabel", "overlay_csv", "overlay_suffix"}
_TOP_KEYS = {"kind", "output", "title", "panel", "series_labels"}


def spec_from_tree(tree: dict) -> FigureSpec:
    unknown = set(tree) - _TOP_KEYS
    if unknown:
        raise FigError(f"unknown figure spec keys: {', '.join(sorted(unknown))}")
    panels = []
    for entry in tree.get("panel", []):
        bad = set(entry) - _PANEL_KEYS
        if bad:
            raise FigError(f"unknown panel keys: {', '.join(sorted(bad))}")
        panels.append(PanelSpec(**entry))
    return FigureSpec(
        kind=tree.get("kind", ""),
        output=tree.get("output", ""),
        panels=tuple(panels),
        title=tree.get("title", ""),
        series_labels=dict(tree.get("series_labels", {})),
    )


def load_spec(path: str) -> FigureSpec:
    try:
        with open(path, "rb") as handle:
            tree = tomllib.load(handle)
    except FileNotFoundError:
        raise FigError(f"figure spec not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise FigError(f"invalid TOML in {path}: {exc}") from None
    return spec_from_tree(tree)


def list_shipped_specs() -> list:
    """Names of the bundled figure specs, without the .toml suffix."""
    root = resources.files("heomfigs.specs")
    names = [
        entry.name[: -len(".toml")]
        for entry in root.iterdir()
        if entry.name.endswith(".toml")
    ]
    return sorted(names)


def shipped_spec_path(name: str) -> str:
    root = resources.files("heomfigs.specs")
    path = root / f"{name}.toml"
    if not path.is_file():
        known = ", ".join(list_shipped_specs())
        raise FigError(f"no shipped figure spec named '{name}' (have: {known})")
    return str(path)
