"""Figure spec loading: shipped specs, custom files, and validation."""

import pytest

from heomfigs import FigError, list_shipped_specs, load_spec
from heomfigs.figspec import KINDS, shipped_spec_path, spec_from_tree


def test_six_shipped_specs_cover_all_kinds():
    names = list_shipped_specs()
    assert len(names) == 6
    specs = [load_spec(shipped_spec_path(name)) for name in names]
    assert {spec.kind for spec in specs} == set(KINDS)
    for spec in specs:
        assert spec.panels
        for panel in spec.panels:
            assert panel.csv.endswith(".csv")


def test_shipped_spec_outputs_are_distinct():
    names = list_shipped_specs()
    outputs = {load_spec(shipped_spec_path(n)).output for n in names}
    assert len(outputs) == 6


def test_unknown_shipped_name_is_rejected():
    with pytest.raises(FigError, match="no_such_spec"):
        shipped_spec_path("no_such_spec")


def test_load_custom_spec(tmp_path):
    path = tmp_path / "custom.toml"
    path.write_text(
        'kind = "evolution"\noutput = "x"\n[[panel]]\ncsv = "a.csv"\n'
    )
    spec = load_spec(str(path))
    assert spec.kind == "evolution"
    assert spec.panels[0].csv == "a.csv"


def test_missing_spec_file_is_named():
    with pytest.raises(FigError, match="nowhere.toml"):
        load_spec("nowhere.toml")


def test_invalid_toml_is_rejected(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("kind = [unclosed\n")
    with pytest.raises(FigError, match="invalid TOML"):
        load_spec(str(path))


def test_unknown_kind_is_rejected():
    with pytest.raises(FigError, match="unknown figure kind"):
        spec_from_tree(
            {"kind": "pie_chart", "output": "x", "panel": [{"csv": "a.csv"}]}
        )


def test_spec_without_panels_is_rejected():
    with pytest.raises(FigError, match="panel"):
        spec_from_tree({"kind": "evolution", "output": "x"})


def test_unknown_keys_are_rejected():
    with pytest.raises(FigError, match="colour"):
        spec_from_tree(
            {
                "kind": "evolution",
                "output": "x",
                "colour": "red",
                "panel": [{"csv": "a.csv"}],
            }
        )
    with pytest.raises(FigError, match="smooth"):
        spec_from_tree(
            {
                "kind": "evolution",
                "output": "x",
                "panel": [{"csv": "a.csv", "smooth": True}],
            }
        )


def test_empty_output_is_rejected():
    with pytest.raises(FigError, match="output"):
        spec_from_tree({"kind": "evolution", "panel": [{"csv": "a.csv"}]})
