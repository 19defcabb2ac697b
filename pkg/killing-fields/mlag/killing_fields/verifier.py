"""
Executable checks for a computed Killing field and the even-order obstruction determinant.

Every check returns CheckReport objects instead of raising, so a single run
can report all failures with their witnesses.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from mlag.killing_fields.derivations import Derivations, a_coeff
from mlag.killing_fields.errors import MixedPrefactor
from mlag.killing_fields.exact_ring import I, Poly, grading, to_balanced
from mlag.killing_fields.killing_engine import (
    DET3_CONSTANT,
    PREFACTOR_THIRDS,
    KillingState,
    coefficient_name,
    minimum_tower,
    superscript,
)
from mlag.killing_fields.loop_matrix import (
    CLOSED_FORMS,
    DEGREE_OFFSETS,
    PERIOD,
    KillingComponents,
    det3,
    sigma2,
)

logger = logging.getLogger(__name__)

ALL_CHECKS = ("jacobi", "charpoly", "conservation", "homogeneity", "crosscheck")
KINDS = ("jacobi", "pseudo")

PASS = "pass"
FAIL = "fail"

GAMMA = Poly.monomial(gamma=1)
H3 = Poly.monomial(q=3)
HBAR3 = Poly.monomial(hbar3=1)

# right-hand sides of the structure equations: d_xi X at lambda^d pairs with
# coefficients at lambda^(d+1), d_xibar X with coefficients at lambda^(d-1)
XI_ROWS: Dict[str, Tuple[Tuple[Poly, str], ...]] = {
    "p": ((GAMMA * I, "b"), (H3 * (2 * I), "c")),
    "b": ((H3 * I, "f"),),
    "c": ((GAMMA * I, "f"),),
    "f": ((GAMMA * (Fraction(3, 2) * I), "a"),),
    "a": ((GAMMA * I, "g"),),
    "g": ((GAMMA * -I, "t"), (H3 * -I, "s")),
    "s": ((GAMMA * (Fraction(1, 2) * I), "p"),),
    "t": ((H3 * I, "p"),),
}

XIBAR_ROWS: Dict[str, Tuple[Tuple[Poly, str], ...]] = {
    "p": ((GAMMA * I, "s"), (HBAR3 * (2 * I), "t")),
    "b": ((GAMMA * (Fraction(1, 2) * I), "p"),),
    "c": ((HBAR3 * I, "p"),),
    "f": ((GAMMA * I, "c"), (HBAR3 * I, "b")),
    "a": ((GAMMA * I, "f"),),
    "g": ((GAMMA * (Fraction(3, 2) * I), "a"),),
    "s": ((HBAR3 * -I, "g"),),
    "t": ((GAMMA * -I, "g"),),
}

# spectral weights mod 6 allowed for the Jacobi (a) and pseudo-Jacobi (p) towers
WEIGHT_RESIDUES = {"a": (2, 4), "p": (1, 5)}


@dataclass(frozen=True)
class CheckReport:
    """
    Outcome of one check on one subject.

    Attributes:
        check: The check family, one of ALL_CHECKS or ``reference``.
        subject: What was checked, e.g. ``a7`` or ``sigma2``.
        status: ``pass`` or ``fail``.
        witness: The nonzero residue of a failed check.
        checked_range: Inclusive (low, high) lambda-degree or index range, if any.
        detail: Free text for humans.
    """

    check: str
    subject: str
    status: str
    witness: Optional[Poly] = None
    checked_range: Optional[Tuple[int, int]] = None
    detail: str = ""

    def __post_init__(self):
        if self.status not in (PASS, FAIL):
            raise ValueError(f"status must be '{PASS}' or '{FAIL}', got '{self.status}'")
        if self.status == FAIL and not self.witness:
            raise ValueError(f"failed check {self.check}:{self.subject} needs a nonzero witness")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "subject": self.subject,
            "status": self.status,
            "range": list(self.checked_range) if self.checked_range else None,
            "witness": str(self.witness) if self.witness else None,
            "detail": self.detail,
        }


def _report(check: str, subject: str, residue: Poly, checked_range=None, detail: str = "") -> CheckReport:
    if residue:
        return CheckReport(check, subject, FAIL, residue, checked_range, detail)
    return CheckReport(check, subject, PASS, None, checked_range, detail)


def jacobi_apply(A: Poly, kind: str = "jacobi", ring: Optional[Derivations] = None) -> Poly:
    """
    Apply the Jacobi operator d_xi d_xibar + 3/2 gamma^2, or with kind="pseudo"
    the pseudo-Jacobi operator d_xi d_xibar + 1/2 (gamma^2 + 4 h3 hbar3).

    Raises:
        ConjugateInput: If A contains hbar3.
        ValueError: For an unknown kind.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown Jacobi operator '{kind}', expected one of {KINDS}")
    if ring is None:
        ring = Derivations(max(A.max_h_index() + 1, 4))
    if kind == "jacobi":
        potential = Poly.monomial(Fraction(3, 2), gamma=2)
    else:
        potential = Poly.monomial(Fraction(1, 2), gamma=2) + Poly.monomial(2, q=3, hbar3=1)
    return ring.d_xi(ring.d_xibar(A)) + potential * A


def _next_degree(kc: KillingComponents, name: str) -> int:
    """First lambda-degree on the progression of ``name`` that has not been computed."""
    degrees = kc.component(name).degrees()
    return degrees[-1] + PERIOD if degrees else DEGREE_OFFSETS[kc.ansatz][name]


def _lowest_nonzero_degree(kc: KillingComponents, name: str) -> int:
    """Lowest lambda-degree at which ``name`` is, or may still be, nonzero."""
    for d, poly in kc.component(name).items():
        if poly:
            return d
    return _next_degree(kc, name)


def determined_degree(kc: KillingComponents, which: str) -> int:
    """
    Largest lambda-degree through which det3 or sigma2 only involves computed coefficients.

    A product term at lambda^D is fixed once every factor's first missing
    coefficient, combined with the lowest nonzero degrees of the other
    factors, lands above D. Coefficients computed as exactly zero count as known.
    """
    if which not in CLOSED_FORMS:
        raise ValueError(f"unknown invariant '{which}', expected one of {sorted(CLOSED_FORMS)}")
    lows = {name: _lowest_nonzero_degree(kc, name) for name in DEGREE_OFFSETS[kc.ansatz]}
    bound = None
    for _, names in CLOSED_FORMS[which][0]:
        for i, name in enumerate(names):
            others = sum(lows[other] for j, other in enumerate(names) if j != i)
            limit = _next_degree(kc, name) + others - 1
            bound = limit if bound is None else min(bound, limit)
    return bound


def _tower_ring(state: KillingState) -> Derivations:
    return Derivations(max(minimum_tower(state.cycles_done), state.tower_high_water + 2))


def check_jacobi(state: KillingState, ring: Derivations) -> List[CheckReport]:
    reports = []
    for name, kind in (("p", "pseudo"), ("a", "jacobi")):
        for d, poly in state.components.component(name).items():
            residue = jacobi_apply(poly, kind, ring)
            reports.append(_report("jacobi", coefficient_name(name, d), residue, detail=f"{kind} operator"))
    return reports


def check_charpoly(state: KillingState) -> List[CheckReport]:
    """sigma2 vanishes and det3 equals its constant at lambda^3 at every determined degree."""
    kc = state.components
    reports = []
    for which, evaluate in (("sigma2", sigma2), ("det3", det3)):
        top = determined_degree(kc, which)
        series = evaluate(kc, degrees=range(top + 1))
        expected = {3: DET3_CONSTANT[kc.ansatz]} if which == "det3" else {}
        residue = Poly.zero()
        bad_degree = None
        for d in range(top + 1):
            diff = series.coefficient(d) - expected.get(d, Poly.zero())
            if diff:
                residue, bad_degree = diff, d
                break
        detail = f"first nonzero residue at lambda^{bad_degree}" if residue else ""
        if which == "det3" and not residue:
            detail = f"det3 = ({DET3_CONSTANT[kc.ansatz]}) lambda^3"
        reports.append(_report("charpoly", which, residue, (0, top), detail))
    return reports


def check_conservation(state: KillingState, ring: Derivations) -> List[CheckReport]:
    """
    Closure of b xi + s xibar: d_xibar b = d_xi s = (i/2) gamma p, with b at
    lambda^d, s at lambda^(d-2) and p at lambda^(d-1).
    """
    kc = state.components
    half_gamma = GAMMA * (Fraction(1, 2) * I)
    reports = []
    for d, b in kc.component("b").items():
        if not kc.has("p", d - 1):
            continue
        target = half_gamma * kc.coefficient("p", d - 1)
        dbar_b = ring.d_xibar(b)
        residue = dbar_b - target
        detail = "d_xibar b = (i/2) gamma p"
        if kc.has("s", d - 2):
            s_residue = ring.d_xi(kc.coefficient("s", d - 2)) - target
            residue = residue if residue else s_residue
            detail += " = d_xi s"
        if dbar_b.hbar3_degree():
            detail += "; d_xibar b keeps hbar3"
        reports.append(_report("conservation", coefficient_name("b", d), residue, detail=detail))
    return reports


def check_homogeneity(state: KillingState) -> List[CheckReport]:
    """Prefactor, spectral weight, order and weight residues of every nonzero coefficient."""
    reports = []
    for name, d, poly in state.components.coefficients():
        subject = coefficient_name(name, d)
        if not poly:
            reports.append(_report("homogeneity", subject, Poly.zero(), detail="zero coefficient"))
            continue
        index = superscript(d)
        try:
            body = to_balanced(poly, PREFACTOR_THIRDS[name]).body
        except MixedPrefactor as e:
            reports.append(_report("homogeneity", subject, poly, detail=str(e)))
            continue
        order, weight, _ = grading(body)
        problems = []
        if body.hbar3_degree():
            problems.append("body depends on r^2")
        if weight != index - 3:
            problems.append(f"weight {weight} != {index - 3}")
        expected_order = index if index >= 4 else 0
        if order != expected_order:
            problems.append(f"order {order} != {expected_order}")
        if name in WEIGHT_RESIDUES and weight is not None and weight % PERIOD not in WEIGHT_RESIDUES[name]:
            problems.append(f"weight {weight} off the residues {WEIGHT_RESIDUES[name]} mod {PERIOD}")
        residue = poly if problems else Poly.zero()
        reports.append(_report("homogeneity", subject, residue, detail="; ".join(problems)))
    return reports


def _row_rhs(kc: KillingComponents, row: Tuple[Tuple[Poly, str], ...], degree: int) -> Optional[Poly]:
    """Right-hand side of a structure-equation row, or None if a term is not computed yet."""
    if degree < 0 or not all(kc.has(other, degree) for _, other in row):
        return None
    total = Poly.zero()
    for factor, other in row:
        total = total + factor * kc.coefficient(other, degree)
    return total


def check_crosscheck(state: KillingState, ring: Derivations) -> List[CheckReport]:
    """Every xi- and xibar-row of the structure equations wherever both sides are computed."""
    kc = state.components
    reports = []
    for name, d, poly in kc.coefficients():
        subject = coefficient_name(name, d)
        for label, rows, derivative, shift in (
            ("xi", XI_ROWS, ring.d_xi, 1),
            ("xibar", XIBAR_ROWS, ring.d_xibar, -1),
        ):
            rhs = _row_rhs(kc, rows[name], d + shift)
            if rhs is None:
                continue
            reports.append(_report("crosscheck", subject, derivative(poly) - rhs, detail=f"d_{label} row"))
    return reports


def check_killing(
    state: KillingState, ring: Optional[Derivations] = None, checks: Iterable[str] = ALL_CHECKS
) -> List[CheckReport]:
    """
    Run the selected checks on a computed state.

    Raises:
        ValueError: For an unknown check name.
    """
    checks = tuple(checks)
    unknown = [c for c in checks if c not in ALL_CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}, expected a subset of {ALL_CHECKS}")
    if ring is None:
        ring = _tower_ring(state)

    reports: List[CheckReport] = []
    for check in ALL_CHECKS:
        if check not in checks:
            continue
        if check == "jacobi":
            found = check_jacobi(state, ring)
        elif check == "charpoly":
            found = check_charpoly(state)
        elif check == "conservation":
            found = check_conservation(state, ring)
        elif check == "homogeneity":
            found = check_homogeneity(state)
        else:
            found = check_crosscheck(state, ring)
        failed = sum(1 for r in found if not r.passed)
        logger.debug(f"{check}: {len(found)} report(s), {failed} failed")
        reports.extend(found)
    return reports


def _t_values(k: int) -> List[Fraction]:
    n = 2 * k
    values = [
        a_coeff(n, n - 3) + a_coeff(n, 0) - k,
        a_coeff(n, n - 4) + a_coeff(n, 1) - k,
    ]
    values.extend(a_coeff(n, n - j - 3) + a_coeff(n, j) for j in range(2, k - 1))
    return values


def obstruction_matrix(k: int) -> List[List[Fraction]]:
    """
    The (k-1)x(k-1) three-term system in x_0..x_{k-2} whose full rank excludes
    Jacobi fields of even order 2k. Column 0 holds the t_j.

    Raises:
        ValueError: If k < 4.
    """
    if k < 4:
        raise ValueError(f"the obstruction system is defined for k >= 4, got {k}")
    size = k - 1
    t = _t_values(k)
    rows = [[Fraction(0)] * size for _ in range(size)]
    for j in range(size):
        rows[j][0] += t[j]
    rows[0][1] += 1
    rows[1][1] += 1
    rows[1][2] += 1
    for j in range(2, k - 2):
        for col in (j - 1, j, j + 1):
            rows[j][col] += 1
    last = k - 2
    rows[last][k - 3] += 1
    rows[last][k - 2] += 2
    return rows


def fraction_determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination over Fractions with row pivoting."""
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for i in range(n):
        pivot = next((r for r in range(i, n) if m[r][i] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != i:
            m[i], m[pivot] = m[pivot], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            factor = m[r][i] / m[i][i]
            if factor:
                for c in range(i, n):
                    m[r][c] -= factor * m[i][c]
    return det


def chi(k: int) -> Fraction:
    """Determinant of the obstruction system, gamma^2 set to 1."""
    return fraction_determinant(obstruction_matrix(k))


def chi_epsilon_sum(k: int) -> Fraction:
    """sum_j eps_j t_j with eps_j = -2 when j = k mod 3 and +1 otherwise; equals chi(k) up to sign."""
    if k < 4:
        raise ValueError(f"the obstruction system is defined for k >= 4, got {k}")
    return sum((-2 if j % 3 == k % 3 else 1) * t for j, t in enumerate(_t_values(k)))


__all__ = [
    "ALL_CHECKS",
    "CheckReport",
    "check_killing",
    "chi",
    "chi_epsilon_sum",
    "determined_degree",
    "fraction_determinant",
    "jacobi_apply",
    "obstruction_matrix",
]
