from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import homogeneous_bodies

from mlag.killing_fields.derivations import Derivations
from mlag.killing_fields.errors import ConjugateInput
from mlag.killing_fields.exact_ring import BalancedPoly, Poly, from_balanced, grading, to_balanced, z
from mlag.killing_fields.killing_engine import KillingState, run, seed
from mlag.killing_fields.loop_matrix import Ansatz
from mlag.killing_fields.verifier import (
    ALL_CHECKS,
    FAIL,
    PASS,
    CheckReport,
    check_charpoly,
    check_killing,
    chi,
    chi_epsilon_sum,
    determined_degree,
    fraction_determinant,
    jacobi_apply,
    obstruction_matrix,
)

P4_COEFFICIENTS = [
    ("g", 0),
    ("s", 1),
    ("t", 1),
    ("p", 2),
    ("b", 3),
    ("c", 3),
    ("f", 4),
    ("a", 5),
    ("g", 6),
    ("s", 7),
    ("t", 7),
    ("p", 8),
]

A5_COEFFICIENTS = [
    ("b", 1),
    ("c", 1),
    ("f", 2),
    ("a", 3),
    ("g", 4),
    ("s", 5),
    ("t", 5),
    ("p", 6),
    ("b", 7),
    ("c", 7),
    ("f", 8),
    ("a", 9),
]


@pytest.mark.parametrize("state_fixture", ["p4_state", "a5_state"])
def test_computed_fields_pass_every_check(request, state_fixture):
    state = request.getfixturevalue(state_fixture)
    reports = check_killing(state)
    failed = [r.to_dict() for r in reports if not r.passed]
    assert failed == []
    assert {r.check for r in reports} == set(ALL_CHECKS)


def test_charpoly_ranges(p4_state):
    reports = {r.subject: r for r in check_charpoly(p4_state)}
    assert reports["sigma2"].checked_range == (0, 9)
    assert reports["det3"].checked_range == (0, 14)
    assert determined_degree(p4_state.components, "sigma2") == 9
    assert determined_degree(p4_state.components, "det3") == 14


def test_charpoly_ranges_without_cycles():
    kc = run(Ansatz.P4, 0).components
    assert determined_degree(kc, "sigma2") == 3
    assert determined_degree(kc, "det3") == 8


def test_seed_only_charpoly():
    """The seeds alone already satisfy det3 = 27/2 gamma^2 lambda^3."""
    reports = check_charpoly(seed(Ansatz.P4))
    assert all(r.passed for r in reports)


def test_determined_degree_unknown_invariant(p4_state):
    with pytest.raises(ValueError):
        determined_degree(p4_state.components, "trace")


def test_jacobi_apply():
    jacobi_field = z(5) - z(4, 2) * Fraction(5, 3)
    assert jacobi_apply(jacobi_field) == Poly.zero()
    assert jacobi_apply(z(4), kind="pseudo") == Poly.zero()
    assert jacobi_apply(z(4)) != Poly.zero()


def test_jacobi_apply_rejects():
    with pytest.raises(ValueError, match="unknown Jacobi operator"):
        jacobi_apply(z(4), kind="laplace")
    with pytest.raises(ConjugateInput):
        jacobi_apply(Poly.monomial(hbar3=1) * z(4))


@pytest.mark.parametrize(
    "state_fixture,name,degree",
    [("p4_state", n, d) for n, d in P4_COEFFICIENTS] + [("a5_state", n, d) for n, d in A5_COEFFICIENTS],
)
def test_perturbed_coefficient_is_caught(request, state_fixture, name, degree):
    """Adding z_4 to any single coefficient breaks at least one check."""
    state = request.getfixturevalue(state_fixture)
    kc = state.components
    kc = kc.with_coefficient(name, degree, kc.coefficient(name, degree) + z(4))
    state = KillingState.from_components(kc, state.cycles_done)
    failed = [r for r in check_killing(state) if not r.passed]
    assert failed
    assert all(r.witness for r in failed)


def test_check_selection(p4_state):
    reports = check_killing(p4_state, checks=["jacobi"])
    assert {r.subject for r in reports} == {"p4", "a7", "p10"}
    with pytest.raises(ValueError, match="unknown checks"):
        check_killing(p4_state, checks=["jacobi", "vibes"])


def test_check_report():
    report = CheckReport("jacobi", "a7", PASS, checked_range=(0, 3))
    assert report.passed
    assert report.to_dict() == {
        "check": "jacobi",
        "subject": "a7",
        "status": "pass",
        "range": [0, 3],
        "witness": None,
        "detail": "",
    }
    with pytest.raises(ValueError, match="nonzero witness"):
        CheckReport("jacobi", "a7", FAIL, Poly.zero())
    with pytest.raises(ValueError):
        CheckReport("jacobi", "a7", "maybe")


def test_obstruction_matrix_k4():
    assert obstruction_matrix(4) == [[14, 1, 0], [38, 1, 1], [63, 1, 2]]
    assert chi(4) == 1
    assert chi_epsilon_sum(4) == 1


def test_obstruction_matrix_shape():
    rows = obstruction_matrix(7)
    assert len(rows) == 6
    assert rows[3][1:] == [0, 1, 1, 1, 0]
    assert rows[-1][1:] == [0, 0, 0, 1, 2]
    with pytest.raises(ValueError):
        obstruction_matrix(3)
    with pytest.raises(ValueError):
        chi_epsilon_sum(2)


@pytest.mark.parametrize("k", range(4, 31))
def test_chi_never_vanishes(k):
    """|chi(k)| is 1/2 for k divisible by 3 and 1 otherwise."""
    expected = Fraction(1, 2) if k % 3 == 0 else Fraction(1)
    assert abs(chi(k)) == expected
    assert abs(chi_epsilon_sum(k)) == expected


@pytest.mark.parametrize("k", range(4, 13))
def test_chi_matches_sympy(k):
    det = sympy.Matrix(obstruction_matrix(k)).det()
    assert det == sympy.Rational(chi(k).numerator, chi(k).denominator)


def test_fraction_determinant():
    assert fraction_determinant([[0, 1], [1, 0]]) == -1
    assert fraction_determinant([[1, 2], [2, 4]]) == 0
    assert fraction_determinant([[Fraction(1, 2), 3], [1, 8]]) == 1


@pytest.mark.slow
@pytest.mark.parametrize("ansatz,high_water", [(Ansatz.P4, 22), (Ansatz.A5, 23)])
def test_three_cycles_pass_every_check(ansatz, high_water):
    state = run(ansatz, 3)
    assert state.tower_high_water == high_water
    assert all(r.passed for r in check_killing(state, Derivations(32)))


@settings(max_examples=200, deadline=None)
@given(homogeneous_bodies(), st.sampled_from(["jacobi", "pseudo"]))
def test_jacobi_preserves_spectral_weight(body, kind):
    image = to_balanced(jacobi_apply(from_balanced(BalancedPoly(0, body)), kind=kind), expected_thirds=0)
    if image.body:
        assert grading(image).weight == grading(body).weight


@settings(max_examples=200, deadline=None)
@given(homogeneous_bodies(), st.integers(-4, 4), st.sampled_from(["jacobi", "pseudo"]))
def test_jacobi_image_is_at_most_linear_in_r2(body, thirds, kind):
    """The image of a balanced polynomial keeps its prefactor and picks up at most one r^2."""
    image = to_balanced(jacobi_apply(from_balanced(BalancedPoly(thirds, body)), kind=kind), expected_thirds=thirds)
    assert image.body.hbar3_degree() <= 1
