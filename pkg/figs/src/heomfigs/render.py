"""Turn figure specs plus simulator CSV files into PNG and SVG pairs.

Every line drawn comes straight from the CSV values. The renderer only
groups, styles, and labels; it never recomputes physics. Output is
deterministic for identical inputs: fixed figure geometry, a fixed SVG
hash salt, and no date stamps in the files.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import FigError, Table, read_table, sweep_axis
from .figspec import FigureSpec, PanelSpec

SERIES_STYLE = {
    "heom_full": ("tab:green", "Full coupling"),
    "heom_rwa": ("tab:orange", "RWA coupling"),
    "heom": ("tab:orange", "HEOM"),
    "markovian": ("tab:purple", "Markovian"),
}
FALLBACK_COLORS = ("tab:blue", "tab:red", "tab:brown", "tab:cyan", "tab:gray")
SERIES_ORDER = ("heom_full", "heom_rwa", "heom", "markovian")
LINESTYLES = (":", "--", "-", "-.")

AXIS_LABELS = {
    "field.gamma_common": r"$\gamma_F\,/\,\omega_0$",
    "field.delta_sq_common": r"$\Delta_F^2\,/\,\omega_0^2$",
    "bath.gamma": r"$\gamma_B\,/\,\omega_0$",
    "bath.delta_sq": r"$\Delta_B^2\,/\,\omega_0^2$",
    "bath.beta": r"$\beta\,\omega_0$",
}
AXIS_SHORT = {
    "field.gamma_common": r"$\gamma_F$",
    "field.delta_sq_common": r"$\Delta_F^2$",
    "bath.gamma": r"$\gamma_B$",
    "bath.delta_sq": r"$\Delta_B^2$",
    "bath.beta": r"$\beta\omega_0$",
}

POPULATION_LABEL = r"excited population $\rho_{ee}$"
TIME_LABEL = r"$t\,\omega_0$"
FREQUENCY_LABEL = r"$\omega\,/\,\omega_0$"
SPECTRUM_LABEL = r"$S(\omega)$ (normalized)"


def _ordered_series(names):
    ranked = [s for s in SERIES_ORDER if s in names]
    extra = sorted(set(names) - set(SERIES_ORDER))
    return ranked + extra


def _series_style(series, spec: FigureSpec, fallback_index):
    color, label = SERIES_STYLE.get(
        series, (FALLBACK_COLORS[fallback_index % len(FALLBACK_COLORS)], series)
    )
    label = spec.series_labels.get(series, label)
    return color, label


def _axis_name(table: Table, panel: PanelSpec):
    axis = sweep_axis(table)
    xlabel = panel.xlabel or AXIS_LABELS.get(axis, axis or "swept parameter")
    short = AXIS_SHORT.get(axis, axis.rpartition(".")[2] or "value")
    return xlabel, short


def _groups(table: Table, ycolumn, xcolumn):
    """Split rows into plot groups keyed by (series, axis value).

    Either key part may be absent from the file; a plain single-run CSV
    yields one group. Values arrive in file order.
    """
    x = table.floats(xcolumn)
    y = table.floats(ycolumn)
    series = table.column("series") if table.has_column("series") else [""] * len(x)
    values = (
        table.floats("axis_value")
        if table.has_column("axis_value")
        else np.zeros(len(x))
    )
    groups = {}
    for k in range(len(x)):
        groups.setdefault((series[k], float(values[k])), ([], []))
        gx, gy = groups[(series[k], float(values[k]))]
        gx.append(x[k])
        gy.append(y[k])
    return {
        key: (np.array(gx), np.array(gy)) for key, (gx, gy) in groups.items()
    }


def _require_same_grid(groups, path, what):
    items = list(groups.items())
    (ref_key, (ref_x, _)) = items[0]
    for key, (x, _) in items[1:]:
        if len(x) != len(ref_x) or not np.allclose(x, ref_x, rtol=0.0, atol=1e-12):
            raise FigError(
                f"mismatched {what} grids in {path}: "
                f"group {_key_name(ref_key)} has {len(ref_x)} points, "
                f"group {_key_name(key)} has {len(x)}"
            )


def _key_name(key):
    series, value = key
    if series and value:
        return f"('{series}', {value:g})"
    return f"'{series}'" if series else f"{value:g}"


def _draw_groups(ax, table, spec, panel, *, ycolumn, xcolumn, what, overlay=False):
    groups = _groups(table, ycolumn, xcolumn)
    _require_same_grid(groups, table.path, what)
    series_names = _ordered_series({s for s, _ in groups})
    axis_values = sorted({v for _, v in groups})
    _, axis_short = _axis_name(table, panel)
    for si, series in enumerate(series_names):
        color, label = _series_style(series, spec, si)
        for vi, value in enumerate(axis_values):
            if (series, value) not in groups:
                continue
            x, y = groups[(series, value)]
            if len(axis_values) > 1:
                style = LINESTYLES[vi % len(LINESTYLES)]
                name = f"{label}, {axis_short}={value:g}"
            else:
                style = "-"
                name = label
            if overlay:
                style = (0, (4, 2))
                name += panel.overlay_suffix
                ax.plot(x, y, color=color, linestyle=style, linewidth=1.2,
                        alpha=0.65, label=name)
            else:
                ax.plot(x, y, color=color, linestyle=style, linewidth=1.6,
                        label=name)


def _panel_steady_scan(ax, spec: FigureSpec, panel: PanelSpec, data_dir):
    table = read_table(os.path.join(data_dir, panel.csv))
    x = table.floats("axis_value")
    y = table.floats("pop_excited")
    series = table.column("series") if table.has_column("series") else [""] * len(x)
    groups = {}
    for k in range(len(x)):
        groups.setdefault((series[k], 0.0), ([], []))
        groups[(series[k], 0.0)][0].append(x[k])
        groups[(series[k], 0.0)][1].append(y[k])
    groups = {k: (np.array(a), np.array(b)) for k, (a, b) in groups.items()}
    _require_same_grid(groups, table.path, "scan")
    for si, name in enumerate(_ordered_series({s for s, _ in groups})):
        color, label = _series_style(name, spec, si)
        gx, gy = groups[(name, 0.0)]
        ax.plot(gx, gy, color=color, linewidth=1.6, label=label)
    xlabel, _ = _axis_name(table, panel)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(panel.ylabel or POPULATION_LABEL)


def _panel_evolution(ax, spec: FigureSpec, panel: PanelSpec, data_dir):
    table = read_table(os.path.join(data_dir, panel.csv))
    _draw_groups(ax, table, spec, panel, ycolumn="pop_excited", xcolumn="t",
                 what="time")
    if panel.overlay_csv:
        overlay = read_table(os.path.join(data_dir, panel.overlay_csv))
        _draw_groups(ax, overlay, spec, panel, ycolumn="pop_excited",
                     xcolumn="t", what="time", overlay=True)
    ax.set_xlabel(panel.xlabel or TIME_LABEL)
    ax.set_ylabel(panel.ylabel or POPULATION_LABEL)


def _panel_spectrum(ax, spec: FigureSpec, panel: PanelSpec, data_dir):
    table = read_table(os.path.join(data_dir, panel.csv))
    omega = table.floats("omega")
    if omega.min() >= 0.0:
        raise FigError(
            f"spectrum input {table.path} has no negative-frequency rows; "
            "the rendered panel must show the region below zero"
        )
    _draw_groups(ax, table, spec, panel, ycolumn="s_normalized",
                 xcolumn="omega", what="frequency")
    ax.set_xlim(float(omega.min()), float(omega.max()))
    if omega.min() <= -1.0 <= omega.max():
        ax.axvline(-1.0, color="0.55", linewidth=0.8, linestyle=":")
    ax.set_xlabel(panel.xlabel or FREQUENCY_LABEL)
    ax.set_ylabel(panel.ylabel or SPECTRUM_LABEL)


_PANEL_DRAWERS = {
    "steady_scan": _panel_steady_scan,
    "evolution": _panel_evolution,
    "spectrum": _panel_spectrum,
}


def build_figure(spec: FigureSpec, data_dir="."):
    """Pure assembly step: CSV files in, matplotlib Figure out."""
    draw = _PANEL_DRAWERS[spec.kind]
    n = len(spec.panels)
    fig, axes = plt.subplots(
        1, n, figsize=(5.4 * n, 4.0), constrained_layout=True, squeeze=False
    )
    for ax, panel in zip(axes[0], spec.panels):
        draw(ax, spec, panel, data_dir)
        if panel.title:
            ax.set_title(panel.title, fontsize=11)
        ax.legend(fontsize=8, framealpha=0.9)
        ax.grid(True, alpha=0.25)
    if spec.title:
        fig.suptitle(spec.title)
    return fig


def render(spec: FigureSpec, data_dir=".", out_dir="."):
    """Render one spec to a PNG and SVG pair; returns the written paths."""
    fig = build_figure(spec, data_dir)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    try:
        with matplotlib.rc_context({"svg.hashsalt": "heomfigs"}):
            for suffix, metadata in (
                (".png", {"Software": None}),
                (".svg", {"Date": None}),
            ):
                path = os.path.join(out_dir, spec.output + suffix)
                fig.savefig(path, dpi=150, metadata=metadata)
                written.append(path)
    finally:
        plt.close(fig)
    return written
