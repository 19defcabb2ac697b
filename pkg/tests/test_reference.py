from fractions import Fraction

import pytest

from mlag.killing_fields.exact_ring import GaussianRational, body_term, to_balanced
from mlag.killing_fields.killing_engine import seed
from mlag.killing_fields.loop_matrix import Ansatz
from mlag.killing_fields.reference import compare_with_reference, load_reference_table, parse_reference_entry


def test_load_reference_table_success(reference_file):
    """Test successful loading of the printed coefficients."""
    table = load_reference_table(str(reference_file))
    assert isinstance(table, dict)
    assert len(table["p4"]) == 11
    assert len(table["a5"]) == 12


def test_load_reference_table_file_not_found():
    """Test load_reference_table with nonexistent file."""
    with pytest.raises(FileNotFoundError):
        load_reference_table("nonexistent.yaml")


def test_load_reference_table_invalid_yaml(tmp_path):
    """Test load_reference_table with invalid YAML."""
    invalid_yaml = tmp_path / "invalid.yaml"
    invalid_yaml.write_text("{ invalid: yaml: content")
    with pytest.raises(ValueError):
        load_reference_table(str(invalid_yaml))


def test_load_reference_table_not_a_mapping(tmp_path):
    listing = tmp_path / "list.yaml"
    listing.write_text("- p4\n- a5\n")
    with pytest.raises(ValueError, match="must map"):
        load_reference_table(str(listing))


def test_parse_reference_entry(reference_file):
    table = load_reference_table(str(reference_file))
    component, degree, poly = parse_reference_entry("b5", table["p4"]["b5"])
    assert (component, degree) == ("b", 3)

    scale = GaussianRational(0, Fraction(-1, 3))
    expected = (body_term(1, gamma=-1, z={5: 1}) + body_term(Fraction(-5, 3), gamma=-1, z={4: 2})) * scale
    balanced = to_balanced(poly)
    assert balanced.prefactor_thirds == 1
    assert balanced.body == expected


@pytest.mark.parametrize(
    "name,entry",
    [
        ("q5", {"thirds": 0, "body": []}),
        ("b", {"thirds": 0, "body": []}),
        ("b5", {"body": [[1, {"z5": 1}]]}),
        ("b5", {"thirds": 1, "body": [["one", {"z5": 1}]]}),
    ],
)
def test_parse_reference_entry_malformed(name, entry):
    with pytest.raises(ValueError):
        parse_reference_entry(name, entry)


@pytest.mark.parametrize("state_fixture", ["p4_state", "a5_state"])
def test_compare_with_reference(request, reference_file, state_fixture):
    state = request.getfixturevalue(state_fixture)
    reports = compare_with_reference(state, load_reference_table(str(reference_file)))
    assert reports
    assert all(r.passed for r in reports)
    assert all(r.check == "reference" for r in reports)


def test_compare_reports_missing_coefficients(reference_file):
    """Coefficients beyond the computed range fail with the printed value as witness."""
    table = load_reference_table(str(reference_file))
    reports = {r.subject: r for r in compare_with_reference(seed(Ansatz.A5), table)}
    assert reports["b3"].passed
    assert reports["c3"].passed
    assert not reports["a11"].passed
    assert reports["a11"].detail == "not computed"
    assert reports["a11"].witness
    assert list(reports)[:2] == ["b3", "c3"]


def test_compare_with_empty_table(p4_state, caplog):
    assert compare_with_reference(p4_state, {"a5": {}}) == []
    assert "no entries for p4" in caplog.text
