"""
Total derivatives on the prolongation ring.

``d_xi`` and ``d_xibar`` are the xi- and xibar-coefficients of the exterior
derivative modulo the contact ideal:

    d h_j = h_{j+1} xi + T_j xibar   (j >= 3, with T_3 = 0)

so d_xi acts by h_j -> h_{j+1} (and q -> q^-2 h_4 / 3), d_xibar by h_j -> T_j.
Both annihilate gamma; d_xi annihilates hbar3.
"""

import logging
import threading
from fractions import Fraction
from math import comb
from typing import Dict

from mlag.killing_fields.errors import ConjugateInput, TowerBoundExceeded
from mlag.killing_fields.exact_ring import (
    BalancedPoly,
    GaussianRational,
    MonomialKey,
    Poly,
    accumulate,
    key_mul,
    to_balanced,
)

logger = logging.getLogger(__name__)

METHODS = ("recursive", "closed")


def a_coeff(j: int, s: int) -> Fraction:
    """
    Coefficient a_{j,s} = (j + 2s + 3) / (2(j - 1)) * C(j - 1, s + 2) of the closed form of T_{j+1}.

    Raises:
        ValueError: Unless j >= 3 and 0 <= s <= j - 3.
    """
    if j < 3 or not 0 <= s <= j - 3:
        raise ValueError(f"a_coeff needs j >= 3 and 0 <= s <= j-3, got j={j}, s={s}")
    return Fraction(j + 2 * s + 3, 2 * (j - 1)) * comb(j - 1, s + 2)


def gauss_curvature() -> Poly:
    """R = gamma^2 - 2 h3 hbar3."""
    return Poly.monomial(gamma=2) + Poly.monomial(-2, q=3, hbar3=1)


def curvature_derivative(s: int) -> Poly:
    """The s-th xi-derivative of R: delta_{0s} gamma^2 - 2 h_{3+s} hbar3."""
    term = Poly.h(3 + s) * Poly.monomial(-2, hbar3=1)
    return term + Poly.monomial(gamma=2) if s == 0 else term


def _lower(e_h, j):
    """e_h with one power of h_j removed."""
    out = []
    for idx, e in e_h:
        if idx == j:
            if e > 1:
                out.append((idx, e - 1))
        else:
            out.append((idx, e))
    return tuple(out)


def _raise(e_h, j):
    """e_h with one more power of h_j."""
    merged = dict(e_h)
    merged[j] = merged.get(j, 0) + 1
    return tuple(sorted(merged.items()))


class Derivations:
    """
    Derivations d_xi, d_xibar and the memoized T_j table on the tower h_4..h_N.

    Args:
        max_tower: The bound N. Creating h_{N+1} raises TowerBoundExceeded.
    """

    def __init__(self, max_tower: int = 32):
        if max_tower < 4:
            raise ValueError(f"max_tower must be at least 4, got {max_tower}")
        self.max_tower = max_tower
        self._tj: Dict[int, Poly] = {3: Poly.zero()}
        self._lock = threading.Lock()

    def _check_index(self, j: int) -> None:
        if j > self.max_tower:
            raise TowerBoundExceeded(j, self.max_tower)

    def d_xi(self, p: Poly) -> Poly:
        """xi-derivative: h_j -> h_{j+1}, q -> (1/3) q^-2 h_4, hbar3 -> 0, gamma -> 0."""
        acc: Dict[MonomialKey, GaussianRational] = {}
        for key, coeff in p.raw_items():
            g, e_q, m, e_h = key
            if e_q:
                self._check_index(4)
                accumulate(acc, MonomialKey(g, e_q - 3, m, _raise(e_h, 4)), coeff * Fraction(e_q, 3))
            for j, e in e_h:
                self._check_index(j + 1)
                accumulate(acc, MonomialKey(g, e_q, m, _raise(_lower(e_h, j), j + 1)), coeff * e)
        return Poly.from_accumulator(acc)

    def d_xibar(self, p: Poly) -> Poly:
        """
        xibar-derivative of an unbarred polynomial: h_j -> T_j, q -> 0.

        Raises:
            ConjugateInput: If p contains hbar3.
        """
        if p.hbar3_degree():
            raise ConjugateInput(f"d_xibar only accepts hbar3-free input, got {p}")
        acc: Dict[MonomialKey, GaussianRational] = {}
        for key, coeff in p.raw_items():
            g, e_q, m, e_h = key
            for j, e in e_h:
                rest = MonomialKey(g, e_q, m, _lower(e_h, j))
                scaled = coeff * e
                for t_key, t_coeff in self.tj(j).raw_items():
                    accumulate(acc, key_mul(rest, t_key), scaled * t_coeff)
        return Poly.from_accumulator(acc)

    def tj(self, j: int, method: str = "recursive") -> Poly:
        """
        T_j, the xibar-coefficient of d h_j.

        ``recursive`` uses T_{j+1} = d_xi T_j + (j/2) R h_j (memoized);
        ``closed`` sums a_{j-1,s} h_{j-1-s} d_xi^s R directly.

        Raises:
            ValueError: If j < 3 or the method is unknown.
            TowerBoundExceeded: If j > N + 1.
        """
        if method not in METHODS:
            raise ValueError(f"unknown T_j method '{method}', expected one of {METHODS}")
        if j < 3:
            raise ValueError(f"T_j is defined for j >= 3, got {j}")
        if j > self.max_tower + 1:
            raise TowerBoundExceeded(j, self.max_tower + 1)
        if method == "closed":
            return self._tj_closed(j)
        cached = self._tj.get(j)
        if cached is not None:
            return cached
        with self._lock:
            top = max(self._tj)
            while top < j:
                nxt = self.d_xi(self._tj[top]) + gauss_curvature() * Poly.h(top) * Fraction(top, 2)
                self._tj[top + 1] = nxt
                top += 1
                logger.debug(f"Extended T_j table to j={top} ({len(nxt)} terms)")
            return self._tj[j]

    def _tj_closed(self, j: int) -> Poly:
        if j == 3:
            return Poly.zero()
        prev = j - 1
        total = Poly.zero()
        for s in range(prev - 2):
            total = total + Poly.h(prev - s) * curvature_derivative(s) * a_coeff(prev, s)
        return total

    def tj_hat(self, j: int) -> BalancedPoly:
        """T_j in balanced form, h3^(-(j-1)/3) T_j, a body in r^2 and z_4, z_5, ..."""
        return to_balanced(self.tj(j), expected_thirds=j - 1)

    def d_omega(self, body: Poly) -> Poly:
        """
        Scaled derivative on balanced bodies:
        z_j -> z_{j+1} - (j/3) z_4 z_j, r^2 -> r^2 z_4, gamma -> 0.
        """
        acc: Dict[MonomialKey, GaussianRational] = {}
        for key, coeff in body.raw_items():
            g, e_q, m, e_h = key
            if e_q:
                raise ValueError(f"d_omega expects a balanced body, found q-power in {key}")
            # each z_j contributes -(j/3) z_4 and each r^2 contributes +z_4
            shift = 3 * m - sum(j * e for j, e in e_h)
            if shift:
                self._check_index(4)
                accumulate(acc, MonomialKey(g, 0, m, _raise(e_h, 4)), coeff * Fraction(shift, 3))
            for j, e in e_h:
                self._check_index(j + 1)
                accumulate(acc, MonomialKey(g, 0, m, _raise(_lower(e_h, j), j + 1)), coeff * e)
        return Poly.from_accumulator(acc)
