"""Rendering: panel content, styling, error paths, and determinism.

Everything here runs on static CSV fixtures; the simulator package is
neither imported nor required.
"""

import os

import matplotlib.pyplot as plt
import pytest

from heomfigs import FigError, FigureSpec, PanelSpec, build_figure, render
from heomfigs import cli

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def spec_for(kind, csv, **panel_kwargs):
    return FigureSpec(
        kind=kind,
        output="probe",
        panels=(PanelSpec(csv=csv, **panel_kwargs),),
    )


def labels_of(ax):
    return [line.get_label() for line in ax.get_lines()]


def test_steady_scan_draws_one_line_per_series():
    fig = build_figure(spec_for("steady_scan", "steady_small.csv"), FIXTURES)
    try:
        ax = fig.axes[0]
        labels = labels_of(ax)
        assert len(labels) == 3
        assert {"Full coupling", "RWA coupling", "Markovian"} == set(labels)
        assert ax.get_xlabel() == r"$\gamma_F\,/\,\omega_0$"
        assert "population" in ax.get_ylabel()
    finally:
        plt.close(fig)


def test_series_label_override():
    spec = FigureSpec(
        kind="steady_scan",
        output="probe",
        panels=(PanelSpec(csv="steady_small.csv"),),
        series_labels={"markovian": "weak-coupling theory"},
    )
    fig = build_figure(spec, FIXTURES)
    try:
        assert "weak-coupling theory" in labels_of(fig.axes[0])
    finally:
        plt.close(fig)


def test_evolution_sweep_draws_series_times_values():
    fig = build_figure(
        spec_for("evolution", "evolution_sweep_small.csv"), FIXTURES
    )
    try:
        ax = fig.axes[0]
        lines = ax.get_lines()
        assert len(lines) == 4
        labels = labels_of(ax)
        assert any(r"$\gamma_B$=0.2" in s for s in labels)
        assert any(r"$\gamma_B$=0.4" in s for s in labels)
        styles = {line.get_linestyle() for line in lines}
        assert len(styles) == 2
    finally:
        plt.close(fig)


def test_evolution_plain_layout_with_overlay():
    fig = build_figure(
        spec_for(
            "evolution",
            "evolution_plain_small.csv",
            overlay_csv="evolution_reference_small.csv",
            overlay_suffix=" (bath only)",
        ),
        FIXTURES,
    )
    try:
        labels = labels_of(fig.axes[0])
        assert len(labels) == 4
        assert sum(1 for s in labels if s.endswith("(bath only)")) == 2
    finally:
        plt.close(fig)


def test_spectrum_panel_shows_negative_frequencies():
    fig = build_figure(spec_for("spectrum", "spectrum_small.csv"), FIXTURES)
    try:
        ax = fig.axes[0]
        assert ax.get_xlim()[0] < 0
        assert ax.get_xlabel() == r"$\omega\,/\,\omega_0$"
        assert len(ax.get_lines()) == 3
    finally:
        plt.close(fig)


def test_spectrum_without_negative_region_is_rejected():
    with pytest.raises(FigError, match="negative-frequency"):
        build_figure(
            spec_for("spectrum", "spectrum_positive_only.csv"), FIXTURES
        )


def test_mismatched_time_grids_are_rejected():
    with pytest.raises(FigError, match="mismatched time grids"):
        build_figure(
            spec_for("evolution", "evolution_mismatched.csv"), FIXTURES
        )


def test_missing_csv_is_named():
    with pytest.raises(FigError, match="absent.csv"):
        build_figure(spec_for("evolution", "absent.csv"), FIXTURES)


def test_render_writes_identical_bytes_across_runs(tmp_path):
    spec = spec_for("steady_scan", "steady_small.csv")
    first = render(spec, FIXTURES, str(tmp_path / "a"))
    second = render(spec, FIXTURES, str(tmp_path / "b"))
    assert [os.path.basename(p) for p in first] == ["probe.png", "probe.svg"]
    for one, two in zip(first, second):
        with open(one, "rb") as fa, open(two, "rb") as fb:
            assert fa.read() == fb.read()


def test_cli_lists_six_specs(capsys):
    assert cli.main(["--list"]) == 0
    out = capsys.readouterr().out.split()
    assert len(out) == 6


def test_cli_renders_custom_spec(tmp_path, capsys):
    spec = tmp_path / "probe.toml"
    spec.write_text(
        'kind = "spectrum"\noutput = "probe"\n'
        '[[panel]]\ncsv = "spectrum_small.csv"\n'
    )
    code = cli.main(
        [
            "--spec",
            str(spec),
            "--data-dir",
            FIXTURES,
            "--out-dir",
            str(tmp_path),
        ]
    )
    assert code == 0
    assert (tmp_path / "probe.png").exists()
    assert (tmp_path / "probe.svg").exists()


def test_cli_reports_errors_with_exit_code_two(tmp_path, capsys):
    spec = tmp_path / "probe.toml"
    spec.write_text(
        'kind = "evolution"\noutput = "probe"\n[[panel]]\ncsv = "absent.csv"\n'
    )
    code = cli.main(["--spec", str(spec), "--data-dir", str(tmp_path)])
    assert code == 2
    assert "absent.csv" in capsys.readouterr().err


def test_cli_requires_a_spec(capsys):
    assert cli.main([]) == 2
