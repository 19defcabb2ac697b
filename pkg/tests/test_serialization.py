import json

import pytest

from mlag.killing_fields.derivations import Derivations
from mlag.killing_fields.exact_ring import Poly
from mlag.killing_fields.killing_engine import run
from mlag.killing_fields.loop_matrix import Ansatz
from mlag.killing_fields.serialization import (
    SCHEMA_VERSION,
    chi_rows,
    dumps_state,
    format_unscaled,
    loads_state,
    parse_state,
    render_latex,
    render_state,
    render_table,
    render_text,
    state_to_payload,
    tj_rows,
)


def test_latex_jacobi_field(a5_state):
    lines = render_latex(a5_state).splitlines()
    assert "a^{5} = z_{5} - \\frac{5}{3} z_{4}^{2}" in lines


def test_latex_scaled_coefficient(p4_state):
    lines = render_latex(p4_state).splitlines()
    assert (
        "b^{5} = -\\frac{1}{3} i \\gamma^{-1} h_3^{\\frac{1}{3}} \\left( z_{5} - \\frac{5}{3} z_{4}^{2} \\right)"
        in lines
    )
    assert "s^{3} = -\\frac{3}{2} i \\gamma h_3^{-\\frac{1}{3}}" in lines
    assert "g^{2} = 0" in lines


def test_text_rendering(p4_state):
    lines = render_text(p4_state).splitlines()
    assert "p4 = z4" in lines
    assert "c5 = -1/3 i h3^(-2/3) (z5 - 7/6 z4^2)" in lines


def test_payload_shape(p4_state):
    payload = state_to_payload(p4_state)
    assert payload["schema_version"] == SCHEMA_VERSION
    assert payload["ansatz"] == "p4"
    assert payload["cycles"] == 1
    p4 = next(c for c in payload["coefficients"] if c["name"] == "p" and c["index"] == 4)
    assert p4 == {
        "name": "p",
        "index": 4,
        "lambda_degree": 2,
        "prefactor_h3_thirds": 0,
        "terms": [{"re": "1", "im": "0", "gamma": 0, "monomial": {"4": 1}}],
    }


def test_dump_is_deterministic(p4_state):
    text = dumps_state(p4_state)
    assert text == dumps_state(run(Ansatz.P4, 1))
    assert text.endswith("\n")
    assert "created" not in text


def test_load_restores_state(a5_state):
    state = loads_state(dumps_state(a5_state))
    assert state.components == a5_state.components
    assert state.cycles_done == 1
    assert state.tower_high_water == 11
    assert state.components.has("p", 0)


def test_parse_accepts_prefixed_variables():
    payload = {
        "schema_version": SCHEMA_VERSION,
        "ansatz": "p4",
        "cycles": 0,
        "coefficients": [
            {
                "name": "p",
                "lambda_degree": 2,
                "prefactor_h3_thirds": 0,
                "terms": [{"re": "1", "monomial": {"z4": 1}}],
            }
        ],
    }
    state = parse_state(payload)
    assert state.coefficient("p", 2) == Poly.monomial(q=-4, h={4: 1})


@pytest.mark.parametrize(
    "payload,message",
    [
        ({"schema_version": 99, "ansatz": "p4", "cycles": 0, "coefficients": []}, "schema_version"),
        ({"schema_version": SCHEMA_VERSION, "ansatz": "p4"}, "malformed"),
        (
            {
                "schema_version": SCHEMA_VERSION,
                "ansatz": "p4",
                "cycles": 0,
                "coefficients": [{"name": "x", "lambda_degree": 2, "prefactor_h3_thirds": 0, "terms": []}],
            },
            "unknown component",
        ),
        (
            {
                "schema_version": SCHEMA_VERSION,
                "ansatz": "p4",
                "cycles": 0,
                "coefficients": [
                    {"name": "p", "lambda_degree": 2, "prefactor_h3_thirds": 0, "terms": [{"monomial": {"z3": 1}}]}
                ],
            },
            "unknown balanced variable",
        ),
        (
            {
                "schema_version": SCHEMA_VERSION,
                "ansatz": "p4",
                "cycles": 0,
                "coefficients": [{"name": "p", "lambda_degree": 2, "prefactor_h3_thirds": 0, "terms": ["z4"]}],
            },
            "malformed",
        ),
        (
            {
                "schema_version": SCHEMA_VERSION,
                "ansatz": "p4",
                "cycles": 0,
                "coefficients": [
                    {"name": "p", "lambda_degree": 2, "prefactor_h3_thirds": 0, "terms": [{"monomial": ["z4"]}]}
                ],
            },
            "malformed",
        ),
    ],
)
def test_parse_rejects(payload, message):
    with pytest.raises(ValueError, match=message):
        parse_state(payload)


def test_loads_rejects_invalid_json():
    with pytest.raises(ValueError, match="invalid JSON"):
        loads_state("{not json")


def test_render_state_formats(p4_state):
    assert json.loads(render_state(p4_state, "json"))["ansatz"] == "p4"
    assert render_state(p4_state, "latex") == render_latex(p4_state)
    with pytest.raises(ValueError, match="unknown format"):
        render_state(p4_state, "html")


def test_format_unscaled():
    ring = Derivations(8)
    assert format_unscaled(ring.tj(4)) == "3/2*gamma^2*h3 - 3*h3^2*hbar3"
    assert format_unscaled(ring.tj(5)) == "7/2*gamma^2*h4 - 10*h3*hbar3*h4"
    assert format_unscaled(Poly.zero()) == "0"


def test_tj_rows():
    rows = tj_rows(Derivations(8), 6)
    assert [row["j"] for row in rows] == [3, 4, 5, 6]
    assert rows[0] == {"j": 3, "T": "0", "agree": True}
    assert rows[1]["T_hat"] == "3/2 gamma^2 - 3 r^2"
    assert [row["weight"] for row in rows[1:]] == [0, 1, 2]
    assert all(row["agree"] for row in rows)


def test_chi_rows():
    rows = chi_rows(4, 6)
    assert [row["k"] for row in rows] == [4, 5, 6]
    assert rows[0]["chi"] == "1"
    assert rows[2]["abs_chi"] == "1/2"
    assert all(row["agree"] for row in rows)


def test_render_table():
    rows = [{"k": 4, "chi": "1", "agree": True}]
    assert render_table(rows, "json") == '{"agree": true, "chi": "1", "k": 4}\n'
    assert render_table(rows, "text") == "k=4  chi=1  agree=True\n"
