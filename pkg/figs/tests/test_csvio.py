"""CSV reader behavior: header metadata, column access, and rejection
of inputs that must not turn into plots."""

import os

import numpy as np
import pytest

from heomfigs import FigError, read_table
from heomfigs.csvio import sweep_axis

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture(name):
    return os.path.join(FIXTURES, name)


def test_reads_meta_columns_and_rows():
    table = read_table(fixture("steady_small.csv"))
    assert table.meta["command"] == "sweep"
    assert table.meta["seed"] == "12345"
    assert table.columns == ["axis_value", "series", "pop_excited", "error"]
    assert len(table.rows) == 12
    assert sweep_axis(table) == "field.gamma_common"


def test_floats_parse_numeric_columns():
    table = read_table(fixture("steady_small.csv"))
    values = table.floats("axis_value")
    assert values.shape == (12,)
    assert np.all(values > 0)


def test_missing_file_is_named():
    with pytest.raises(FigError, match="no_such_file.csv"):
        read_table(fixture("no_such_file.csv"))


def test_missing_column_is_named():
    table = read_table(fixture("missing_column.csv"))
    with pytest.raises(FigError, match="'pop_excited'"):
        table.column("pop_excited")
    with pytest.raises(FigError, match="missing_column.csv"):
        table.floats("pop_excited")


def test_empty_csv_is_rejected():
    with pytest.raises(FigError, match="no data rows"):
        read_table(fixture("empty.csv"))


def test_header_only_comments_rejected(tmp_path):
    path = tmp_path / "only_comments.csv"
    path.write_text("# heomfield 0.1.0\n# command: evolve\n")
    with pytest.raises(FigError, match="no column header"):
        read_table(str(path))


def test_ragged_row_is_rejected(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("a,b\n1,2\n3\n")
    with pytest.raises(FigError, match="row 2"):
        read_table(str(path))


def test_non_numeric_value_is_named(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,pop_excited\n0.0,spam\n")
    table = read_table(str(path))
    with pytest.raises(FigError, match="'spam'"):
        table.floats("pop_excited")


def test_recorded_run_error_is_rejected():
    with pytest.raises(FigError, match="hierarchy too large"):
        read_table(fixture("steady_error_cell.csv"))


def test_sweep_axis_defaults_to_empty(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("t,pop_excited\n0.0,1.0\n")
    assert sweep_axis(read_table(str(path))) == ""
