from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import balanced_bodies, gaussian_rationals, homogeneous_bodies, polys

from mlag.killing_fields.errors import MixedPrefactor, NonMonomialDivisor, StrayConjugate
from mlag.killing_fields.exact_ring import (
    BalancedPoly,
    GaussianRational,
    Grading,
    I,
    Poly,
    body_term,
    from_balanced,
    gr_arith,
    grading,
    poly_mul,
    r2,
    to_balanced,
    z,
)


def test_gaussian_rational_arithmetic():
    """Test exact arithmetic in Q(i)."""
    a = GaussianRational(1, 2)
    b = GaussianRational(3, -1)
    assert a * b == GaussianRational(5, 5)
    assert gr_arith(GaussianRational(5, 5), b, "div") == a
    assert a - a == 0
    assert I * I == -1
    assert GaussianRational("1/2") + Fraction(1, 2) == 1


def test_gaussian_rational_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        gr_arith(GaussianRational(1), GaussianRational(0), "div")


def test_gr_arith_unknown_kind():
    with pytest.raises(ValueError, match="unknown arithmetic kind"):
        gr_arith(GaussianRational(1), GaussianRational(1), "pow")


def test_poly_canonical_form_drops_zeros():
    """Test that cancelled terms disappear so equality is structural."""
    p = Poly.monomial(Fraction(7, 2), gamma=2, h={4: 1})
    assert p - p == Poly.zero()
    assert len(p - p) == 0
    assert Poly({p.terms()[0][0]: 0}) == Poly.zero()


def test_h3_is_stored_as_q_cubed():
    assert Poly.h(3) == Poly.monomial(q=3)
    assert Poly.h(3, 2) == Poly.monomial(q=6)


def test_z_is_scaled_h():
    """z_j = h3^(-j/3) h_j."""
    assert z(4) * Poly.monomial(q=4) == Poly.h(4)
    assert z(5, 2) == Poly.monomial(q=-10, h={5: 2})
    with pytest.raises(ValueError):
        z(3)


def test_r2_is_h3_hbar3():
    assert r2() == Poly.h(3) * Poly.monomial(hbar3=1)


def test_inverse_monomial():
    det = Poly.monomial(9, gamma=2, q=1)
    assert det * det.inverse_monomial() == Poly.one()
    assert det.inverse_monomial() == Poly.monomial(Fraction(1, 9), gamma=-2, q=-1)


@pytest.mark.parametrize(
    "divisor",
    [
        Poly.zero(),
        Poly.monomial(gamma=1) + Poly.monomial(q=1),
        Poly.h(4),
        Poly.monomial(hbar3=1),
    ],
)
def test_inverse_monomial_rejects(divisor):
    with pytest.raises(NonMonomialDivisor):
        divisor.inverse_monomial()


def test_to_balanced_factors_prefactor():
    """-(i/(3 gamma)) h3^(1/3) (z5 - 5/3 z4^2) balances with prefactor 1/3."""
    body = body_term(1, z={5: 1}) + body_term(Fraction(-5, 3), z={4: 2})
    scale = Poly.monomial(GaussianRational(0, Fraction(-1, 3)), gamma=-1, q=1)
    b5 = scale * (z(5) + z(4, 2) * Fraction(-5, 3))

    balanced = to_balanced(b5)
    assert balanced.prefactor_thirds == 1
    assert balanced.body == body * GaussianRational(0, Fraction(-1, 3)) * Poly.monomial(gamma=-1)
    assert from_balanced(balanced) == b5


def test_to_balanced_absorbs_r2():
    p = r2() * z(4)
    assert to_balanced(p) == BalancedPoly(0, body_term(1, r2=1, z={4: 1}))


def test_to_balanced_zero_uses_expected_prefactor():
    assert to_balanced(Poly.zero(), expected_thirds=2) == BalancedPoly(2, Poly.zero())


def test_to_balanced_mixed_prefactor():
    with pytest.raises(MixedPrefactor):
        to_balanced(z(4) + Poly.monomial(q=1))


def test_to_balanced_stray_conjugate():
    """hbar3 without its matching h3 cannot be absorbed into r^2."""
    with pytest.raises(StrayConjugate):
        to_balanced(z(4) + Poly.monomial(hbar3=1))


def test_to_balanced_lone_hbar3():
    """A lone hbar3 is consistent on its own: h3^-1 times r^2."""
    assert to_balanced(Poly.monomial(hbar3=1)) == BalancedPoly(-3, body_term(1, r2=1))
    assert to_balanced(Poly.monomial(2, gamma=1, hbar3=2)) == BalancedPoly(-6, body_term(2, gamma=1, r2=2))


def test_to_balanced_expected_prefactor_mismatch():
    with pytest.raises(MixedPrefactor, match="expected"):
        to_balanced(z(4), expected_thirds=1)


def test_grading():
    """z5 - 5/3 z4^2 has order 5 and weight 2 but mixed degree."""
    body = to_balanced(z(5) - z(4, 2) * Fraction(5, 3)).body
    assert grading(body) == Grading(order=5, weight=2, degree=None)
    assert grading(to_balanced(z(6) * z(4))) == Grading(order=6, weight=4, degree=2)
    assert grading(Poly.zero()).order == 0


@settings(max_examples=1000, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly.zero()
    assert a * Poly.one() == a


@settings(max_examples=200, deadline=None)
@given(polys(), gaussian_rationals)
def test_scale_matches_constant_product(a, c):
    assert a.scale(c) == poly_mul(a, Poly.constant(c))


@settings(max_examples=200, deadline=None)
@given(polys(max_terms=3))
def test_balanced_round_trip_on_single_terms(p):
    """Every single term balances, and balancing is invertible."""
    for key, coeff in p.terms():
        term = Poly({key: coeff})
        assert from_balanced(to_balanced(term)) == term


@settings(max_examples=300, deadline=None)
@given(balanced_bodies().filter(bool), st.integers(-6, 6))
def test_balanced_round_trip(body, thirds):
    bp = BalancedPoly(thirds, body)
    assert to_balanced(from_balanced(bp)) == bp


@settings(max_examples=300, deadline=None)
@given(homogeneous_bodies(), homogeneous_bodies())
def test_weight_is_additive(a, b):
    product = poly_mul(a, b)
    assert grading(product).weight == grading(a).weight + grading(b).weight
