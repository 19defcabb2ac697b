"""
Period-6 recursion for the canonical formal Killing fields X(p^4) and X(a^5).

Each cycle alternates cheap xi-derivative steps read off the structure
equations with two exact 2x2 solves. A solve pairs one xi-row of the structure
equations with the vanishing of a lambda-coefficient of sigma2 or det3; that
coefficient is affine in the two unknowns because they only meet the seed
coefficients at lambda^1.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from mlag.killing_fields.derivations import Derivations
from mlag.killing_fields.errors import CrossCheckMismatch, NonMonomialDivisor, SingularSolve
from mlag.killing_fields.exact_ring import I, GaussianRational, Poly
from mlag.killing_fields.loop_matrix import Ansatz, KillingComponents, det3, sigma2

logger = logging.getLogger(__name__)

# power of h3^(1/3) carried by every coefficient of each component
PREFACTOR_THIRDS: Dict[str, int] = {"p": 0, "a": 0, "b": 1, "g": 1, "f": -1, "s": -1, "c": -2, "t": 2}

# stages of cycle m as (target, lambda-degree offset from 6m)
CYCLE_STAGES: Dict[Ansatz, Tuple[Tuple[str, int], ...]] = {
    Ansatz.P4: (("p", 2), ("bc", 3), ("f", 4), ("a", 5), ("g", 6), ("st", 7)),
    Ansatz.A5: (("f", 2), ("a", 3), ("g", 4), ("st", 5), ("p", 6), ("bc", 7)),
}

# derivative-only stages that end a run on the next (pseudo-)Jacobi coefficient
CLOSING_STAGES: Dict[Ansatz, Tuple[Tuple[str, int], ...]] = {
    Ansatz.P4: (("p", 2),),
    Ansatz.A5: (("f", 2), ("a", 3)),
}

CONSTRAINTS: Dict[Ansatz, Dict[str, str]] = {
    Ansatz.P4: {"bc": "sigma2", "st": "det3"},
    Ansatz.A5: {"bc": "det3", "st": "sigma2"},
}

# det3(mu I + X) constant term demanded at lambda^3
DET3_CONSTANT: Dict[Ansatz, Poly] = {
    Ansatz.P4: Poly.monomial(Fraction(27, 2), gamma=2),
    Ansatz.A5: Poly.monomial(GaussianRational(0, Fraction(-729, 4)), gamma=4),
}

GAMMA = Poly.monomial(gamma=1)
GAMMA_INV = Poly.monomial(gamma=-1)
H3 = Poly.monomial(q=3)
H3_INV = Poly.monomial(q=-3)


def superscript(degree: int) -> int:
    """Index of the coefficient at lambda^degree (b^5 sits at lambda^3 for p4, b^3 at lambda^1 for a5)."""
    return degree + 2


def coefficient_name(name: str, degree: int) -> str:
    return f"{name}{superscript(degree)}"


@dataclass(frozen=True)
class KillingState:
    """A truncated formal Killing field: components, completed cycles and the largest h-index used."""

    components: KillingComponents
    cycles_done: int = 0
    tower_high_water: int = 0

    @property
    def ansatz(self) -> Ansatz:
        return self.components.ansatz

    def coefficient(self, name: str, degree: int) -> Poly:
        return self.components.coefficient(name, degree)

    @classmethod
    def from_components(cls, components: KillingComponents, cycles_done: int) -> "KillingState":
        high = max((poly.max_h_index() for _, _, poly in components.coefficients()), default=0)
        return cls(components, cycles_done, high)


def seed(ansatz: Ansatz) -> KillingState:
    """The printed initial data: s^3, t^3 with g^2 = 0 for p4; b^3, c^3 with p^2 = 0 for a5."""
    ansatz = Ansatz(ansatz)
    kc = KillingComponents(ansatz)
    if ansatz is Ansatz.P4:
        kc = kc.with_coefficient("g", 0, Poly.zero())
        kc = kc.with_coefficient("s", 1, Poly.monomial(GaussianRational(0, Fraction(-3, 2)), gamma=1, q=-1))
        kc = kc.with_coefficient("t", 1, Poly.monomial(GaussianRational(0, Fraction(3, 2)), q=2))
    else:
        kc = kc.with_coefficient("p", 0, Poly.zero())
        kc = kc.with_coefficient("b", 1, Poly.monomial(Fraction(-9, 2), gamma=1, q=1))
        kc = kc.with_coefficient("c", 1, Poly.monomial(Fraction(9, 4), gamma=2, q=-2))
    return KillingState.from_components(kc, 0)


def _require(kc: KillingComponents, name: str, degree: int) -> Poly:
    if not kc.has(name, degree):
        raise ValueError(f"{coefficient_name(name, degree)} is needed but has not been computed")
    return kc.coefficient(name, degree)


def _cross_check(target: str, first: Tuple[str, Poly], second: Tuple[str, Poly]) -> Poly:
    (route1, value1), (route2, value2) = first, second
    if value1 != value2:
        diff = value1 - value2
        logger.error(f"Cross-check failed for {target}: {route1} vs {route2}")
        raise CrossCheckMismatch(target, route1, route2, diff)
    return value1


def _derive_p(kc: KillingComponents, d: int, ring: Derivations) -> KillingComponents:
    s, t = _require(kc, "s", d - 1), _require(kc, "t", d - 1)
    target = coefficient_name("p", d)
    p = _cross_check(
        target,
        ("-(2i/gamma) d_xi s", ring.d_xi(s) * GAMMA_INV * (-2 * I)),
        ("-i h3^-1 d_xi t", ring.d_xi(t) * H3_INV * -I),
    )
    return kc.with_coefficient("p", d, p)


def _derive_f(kc: KillingComponents, d: int, ring: Derivations) -> KillingComponents:
    b, c = _require(kc, "b", d - 1), _require(kc, "c", d - 1)
    target = coefficient_name("f", d)
    f = _cross_check(
        target,
        ("-i h3^-1 d_xi b", ring.d_xi(b) * H3_INV * -I),
        ("-(i/gamma) d_xi c", ring.d_xi(c) * GAMMA_INV * -I),
    )
    return kc.with_coefficient("f", d, f)


def _derive_a(kc: KillingComponents, d: int, ring: Derivations) -> KillingComponents:
    f = _require(kc, "f", d - 1)
    a = ring.d_xi(f) * GAMMA_INV * (I * Fraction(-2, 3))
    return kc.with_coefficient("a", d, a)


def _derive_g(kc: KillingComponents, d: int, ring: Derivations) -> KillingComponents:
    a = _require(kc, "a", d - 1)
    return kc.with_coefficient("g", d, ring.d_xi(a) * GAMMA_INV * -I)


def _linear_terms(kc: KillingComponents, constraint: str, pair: str) -> Tuple[Poly, Poly]:
    """Coefficients of the two unknowns in the target lambda-coefficient of the constraint."""
    b1, c1, s1, t1 = (kc.coefficient(name, 1) for name in "bcst")
    if constraint == "sigma2":
        # -4bs - 4ct: each unknown meets its partner's lambda^1 seed
        return (s1 * -4, t1 * -4) if pair == "bc" else (b1 * -4, c1 * -4)
    if pair == "st":
        # i * 4 s^2 t
        return s1 * t1 * (8 * I), s1 * s1 * (4 * I)
    # i * (-4 b^2 c)
    return b1 * c1 * (-8 * I), b1 * b1 * (-4 * I)


def _solve(kc: KillingComponents, d: int, pair: str, ring: Derivations) -> KillingComponents:
    """
    Solve for the pair (b, c) or (s, t) at lambda^d from

        alpha1 u + beta1 v + y = 0      (constraint coefficient)
        alpha2 u + beta2 v = r          (xi-row of the structure equations)
    """
    constraint = CONSTRAINTS[kc.ansatz][pair]
    u_name, v_name = pair
    # the unknowns meet lambda^1 seeds once in sigma2 and twice in det3
    target_degree = d + (1 if constraint == "sigma2" else 2)
    evaluate = sigma2 if constraint == "sigma2" else det3
    y = evaluate(kc, degrees=[target_degree]).coefficient(target_degree)

    alpha1, beta1 = _linear_terms(kc, constraint, pair)
    if pair == "bc":
        # d_xi p = i gamma b + 2i h3 c
        r = ring.d_xi(_require(kc, "p", d - 1))
        alpha2, beta2 = GAMMA * I, H3 * (2 * I)
    else:
        # d_xi g = -i h3 s - i gamma t
        r = ring.d_xi(_require(kc, "g", d - 1))
        alpha2, beta2 = H3 * -I, GAMMA * -I

    det = alpha1 * beta2 - beta1 * alpha2
    try:
        det_inv = det.inverse_monomial()
    except NonMonomialDivisor as e:
        logger.error(f"Constraint solve for {pair} at lambda^{d} is singular: {det}")
        raise SingularSolve(f"{constraint} solve for {pair} at lambda^{d} has determinant {det}") from e
    logger.debug(f"Solving {pair} at lambda^{d} from {constraint} lambda^{target_degree}, determinant {det}")

    u = (-(y * beta2) - beta1 * r) * det_inv
    v = (alpha1 * r + alpha2 * y) * det_inv
    return kc.with_coefficient(u_name, d, u).with_coefficient(v_name, d, v)


_DERIVE = {"p": _derive_p, "f": _derive_f, "a": _derive_a, "g": _derive_g}


def _run_stage(kc: KillingComponents, target: str, d: int, ring: Derivations) -> KillingComponents:
    if kc.has(target[0], d):
        return kc
    if target in ("bc", "st"):
        kc = _solve(kc, d, target, ring)
    else:
        kc = _DERIVE[target](kc, d, ring)
    logger.debug(f"Computed {', '.join(coefficient_name(name, d) for name in target)}")
    return kc


def step(state: KillingState, ring: Derivations) -> KillingState:
    """Advance one period-6 cycle, skipping stages already computed."""
    kc = state.components
    m = state.cycles_done
    for target, offset in CYCLE_STAGES[kc.ansatz]:
        kc = _run_stage(kc, target, 6 * m + offset, ring)
    return KillingState.from_components(kc, m + 1)


def close(state: KillingState, ring: Derivations) -> KillingState:
    """Run the derivative-only stages leading to the next (pseudo-)Jacobi coefficient."""
    kc = state.components
    m = state.cycles_done
    for target, offset in CLOSING_STAGES[kc.ansatz]:
        kc = _run_stage(kc, target, 6 * m + offset, ring)
    return KillingState.from_components(kc, m)


def minimum_tower(cycles: int) -> int:
    return 6 * cycles + 12


def run(
    ansatz: Ansatz, cycles: int, ring: Optional[Derivations] = None, max_tower: Optional[int] = None
) -> KillingState:
    """
    Seed, apply ``cycles`` full cycles and close the tower.

    Raises:
        ValueError: If cycles < 0 or the tower bound is below 6 * cycles + 12.
    """
    ansatz = Ansatz(ansatz)
    if cycles < 0:
        raise ValueError(f"cycles must be non-negative, got {cycles}")
    if ring is None:
        ring = Derivations(max_tower or minimum_tower(cycles))
    if ring.max_tower < minimum_tower(cycles):
        raise ValueError(
            f"tower bound N={ring.max_tower} is too small for {cycles} cycles (need N >= {minimum_tower(cycles)})"
        )
    state = seed(ansatz)
    for _ in range(cycles):
        state = step(state, ring)
        logger.debug(f"{ansatz.value}: finished cycle {state.cycles_done}, tower high water h_{state.tower_high_water}")
    state = close(state, ring)
    logger.info(
        f"Computed {ansatz.value} tower through {cycles} cycle(s): "
        f"{sum(1 for _ in state.components.coefficients())} coefficients"
    )
    return state


__all__ = [
    "PREFACTOR_THIRDS",
    "DET3_CONSTANT",
    "KillingState",
    "close",
    "coefficient_name",
    "run",
    "seed",
    "step",
    "superscript",
]
