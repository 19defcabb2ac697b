"""
Exact Gaussian-rational coefficients and the graded sparse polynomial ring
in the prolongation variables.

Unscaled monomials are products gamma^a * q^b * hbar3^c * h_4^e4 * ... * h_N^eN
where q is the cube root of h3 (h3 itself is always stored as q^3). The
balanced form factors a polynomial as h3^(k/3) times a body in z_j = h3^(-j/3) h_j
and r^2 = h3 * hbar3.
"""

import operator
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Tuple, Union

from mlag.killing_fields.errors import MixedPrefactor, NonMonomialDivisor, StrayConjugate

Rational = Union[int, Fraction]


class GaussianRational:
    """An element re + im*i of Q(i), with both parts stored as normalized Fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[Rational, str] = 0, im: Union[Rational, str] = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, value: Union["GaussianRational", Rational, str]) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction, str)):
            return cls(value)
        raise TypeError(f"cannot use {type(value).__name__} as a Gaussian rational")

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            return GaussianRational._raw(self.re + other, self.im)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, (GaussianRational, int, Fraction)):
            return NotImplemented
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            return GaussianRational._raw(self.re * other, self.im * other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            return GaussianRational._raw(a * c, a * d)
        if not d:
            return GaussianRational._raw(a * c, b * c)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (GaussianRational, int, Fraction)):
            return NotImplemented
        other = GaussianRational.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if not norm:
            raise ZeroDivisionError("division by zero in Q(i)")
        return self * GaussianRational._raw(other.re / norm, -other.im / norm)

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return GaussianRational.coerce(other) / self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational('{self.re}', '{self.im}')"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "-" if self.im < 0 else "+"
        return f"({self.re} {sign} {abs(self.im)}i)"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

_ARITH = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def gr_arith(a: GaussianRational, b: GaussianRational, kind: str) -> GaussianRational:
    """
    Exact field arithmetic in Q(i).

    Args:
        kind: One of ``add``, ``sub``, ``mul``, ``div``.

    Raises:
        ZeroDivisionError: For ``div`` by zero.
        ValueError: For an unknown kind.
    """
    try:
        op = _ARITH[kind]
    except KeyError:
        raise ValueError(f"unknown arithmetic kind '{kind}', expected one of {sorted(_ARITH)}")
    return op(GaussianRational.coerce(a), GaussianRational.coerce(b))


HExponents = Tuple[Tuple[int, int], ...]


class MonomialKey(NamedTuple):
    """
    Exponent vector of one monomial.

    ``e_h`` is a tuple of (j, exponent) pairs sorted by j with j >= 4 and
    positive exponents. In a balanced body the same key type is reused with
    ``e_q == 0``, ``e_hbar3`` counting r^2 and ``e_h`` counting z_j.
    """

    e_gamma: int
    e_q: int
    e_hbar3: int
    e_h: HExponents

    @property
    def h_order(self) -> int:
        return sum(j * e for j, e in self.e_h)


ONE_KEY = MonomialKey(0, 0, 0, ())


def make_key(gamma: int = 0, q: int = 0, hbar3: int = 0, h: Optional[Mapping[int, int]] = None) -> MonomialKey:
    """Build a validated MonomialKey from keyword exponents."""
    if hbar3 < 0:
        raise ValueError(f"hbar3 exponent must be non-negative, got {hbar3}")
    pairs = []
    for j, e in sorted((h or {}).items()):
        if j < 4:
            raise ValueError(f"h_{j} is not a tower variable (use q for h3)")
        if e < 0:
            raise ValueError(f"h_{j} exponent must be non-negative, got {e}")
        if e:
            pairs.append((int(j), int(e)))
    return MonomialKey(int(gamma), int(q), int(hbar3), tuple(pairs))


def merge_h(a: HExponents, b: HExponents) -> HExponents:
    """Add two sparse h-exponent tuples."""
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for j, e in b:
        merged[j] = merged.get(j, 0) + e
    return tuple(sorted(merged.items()))


def key_mul(a: MonomialKey, b: MonomialKey) -> MonomialKey:
    return MonomialKey(a[0] + b[0], a[1] + b[1], a[2] + b[2], merge_h(a[3], b[3]))


def _sort_key(key: MonomialKey):
    return (key.h_order, key.e_q, key.e_gamma, key.e_hbar3, key.e_h)


Scalar = Union[GaussianRational, int, Fraction]


class Poly:
    """
    Sparse polynomial over Q(i) in canonical normal form.

    No stored coefficient is zero, so structural equality is mathematical
    equality. Instances are treated as immutable.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[MonomialKey, Scalar]] = None):
        clean: Dict[MonomialKey, GaussianRational] = {}
        for key, coeff in (terms or {}).items():
            if not isinstance(key, MonomialKey):
                key = MonomialKey(*key)
            key = make_key(key.e_gamma, key.e_q, key.e_hbar3, dict(key.e_h))
            value = GaussianRational.coerce(coeff)
            if value:
                clean[key] = clean.get(key, ZERO) + value
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _wrap(cls, terms: Dict[MonomialKey, GaussianRational]) -> "Poly":
        obj = object.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def from_accumulator(cls, acc: Dict[MonomialKey, GaussianRational]) -> "Poly":
        """Wrap a dict built by :func:`accumulate`, dropping cancelled terms."""
        return cls._wrap({k: v for k, v in acc.items() if v})

    # constructors

    @classmethod
    def zero(cls) -> "Poly":
        return cls._wrap({})

    @classmethod
    def one(cls) -> "Poly":
        return cls._wrap({ONE_KEY: ONE})

    @classmethod
    def constant(cls, value: Scalar) -> "Poly":
        value = GaussianRational.coerce(value)
        return cls._wrap({ONE_KEY: value} if value else {})

    @classmethod
    def monomial(
        cls,
        coeff: Scalar = 1,
        gamma: int = 0,
        q: int = 0,
        hbar3: int = 0,
        h: Optional[Mapping[int, int]] = None,
    ) -> "Poly":
        coeff = GaussianRational.coerce(coeff)
        if not coeff:
            return cls.zero()
        return cls._wrap({make_key(gamma, q, hbar3, h): coeff})

    @classmethod
    def h(cls, j: int, power: int = 1) -> "Poly":
        """The prolongation variable h_j; h_3 is rewritten as q^3."""
        if j == 3:
            return cls.monomial(q=3 * power)
        return cls.monomial(h={j: power})

    # access

    def raw_items(self):
        """Unordered (key, coefficient) pairs, for hot loops that do not need determinism."""
        return self._terms.items()

    def terms(self) -> List[Tuple[MonomialKey, GaussianRational]]:
        """Terms in the canonical graded order."""
        return sorted(self._terms.items(), key=lambda item: _sort_key(item[0]))

    def __iter__(self) -> Iterator[Tuple[MonomialKey, GaussianRational]]:
        return iter(self.terms())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coefficient(self, key: MonomialKey) -> GaussianRational:
        return self._terms.get(key, ZERO)

    def max_h_index(self) -> int:
        """Largest j with h_j present; 3 if only q or hbar3 occur, 0 for constants."""
        best = 0
        for key in self._terms:
            if key.e_h:
                best = max(best, key.e_h[-1][0])
            elif key.e_q or key.e_hbar3:
                best = max(best, 3)
        return best

    def hbar3_degree(self) -> int:
        return max((key.e_hbar3 for key in self._terms), default=0)

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, Poly):
            if not isinstance(other, (GaussianRational, int, Fraction)):
                return NotImplemented
            other = Poly.constant(other)
        if not other._terms:
            return self
        out = dict(self._terms)
        for key, coeff in other._terms.items():
            prev = out.get(key)
            if prev is None:
                out[key] = coeff
            else:
                total = prev + coeff
                if total:
                    out[key] = total
                else:
                    del out[key]
        return Poly._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._wrap({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Poly, GaussianRational, int, Fraction)):
            return NotImplemented
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.constant(other) - self

    def scale(self, value: Scalar) -> "Poly":
        value = GaussianRational.coerce(value)
        if not value:
            return Poly.zero()
        return Poly._wrap({k: v * value for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if not isinstance(other, (GaussianRational, int, Fraction)):
                return NotImplemented
            return self.scale(other)
        if not self._terms or not other._terms:
            return Poly.zero()
        acc: Dict[MonomialKey, GaussianRational] = {}
        right = list(other._terms.items())
        for k1, c1 in self._terms.items():
            g1, q1, b1, h1 = k1
            for k2, c2 in right:
                key = MonomialKey(g1 + k2[0], q1 + k2[1], b1 + k2[2], merge_h(h1, k2[3]))
                prev = acc.get(key)
                acc[key] = c1 * c2 if prev is None else prev + c1 * c2
        return Poly.from_accumulator(acc)

    __rmul__ = __mul__

    def inverse_monomial(self) -> "Poly":
        """
        Inverse of a monomial c * gamma^a * q^b.

        Raises:
            NonMonomialDivisor: If self is zero, has several terms, or involves hbar3 or h_j.
        """
        if len(self._terms) != 1:
            raise NonMonomialDivisor(f"cannot invert a polynomial with {len(self._terms)} terms")
        ((key, coeff),) = self._terms.items()
        if key.e_hbar3 or key.e_h:
            raise NonMonomialDivisor(f"cannot invert a monomial involving hbar3 or h_j: {self}")
        return Poly._wrap({MonomialKey(-key.e_gamma, -key.e_q, 0, ()): 1 / coeff})

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._terms == other._terms
        if isinstance(other, (GaussianRational, int, Fraction)):
            return self == Poly.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for key, coeff in self.terms():
            factors = []
            if key.e_gamma:
                factors.append("gamma" if key.e_gamma == 1 else f"gamma^{key.e_gamma}")
            if key.e_q:
                factors.append("q" if key.e_q == 1 else f"q^{key.e_q}")
            if key.e_hbar3:
                factors.append("hbar3" if key.e_hbar3 == 1 else f"hbar3^{key.e_hbar3}")
            for j, e in key.e_h:
                factors.append(f"h{j}" if e == 1 else f"h{j}^{e}")
            parts.append("*".join([str(coeff)] + factors))
        return " + ".join(parts)


def accumulate(acc: Dict[MonomialKey, GaussianRational], key: MonomialKey, coeff: GaussianRational) -> None:
    """Add ``coeff`` at ``key`` in a dict accumulator (cancelled entries are dropped later)."""
    prev = acc.get(key)
    acc[key] = coeff if prev is None else prev + coeff


def poly_mul(p: Poly, q: Poly) -> Poly:
    """Exact product in canonical normal form."""
    return p * q


def z(j: int, power: int = 1) -> Poly:
    """The balanced variable z_j = h3^(-j/3) h_j written in the unscaled ring."""
    if j < 4:
        raise ValueError(f"z_{j} is not a tower variable")
    return Poly.monomial(q=-j * power, h={j: power})


def r2(power: int = 1) -> Poly:
    """r^2 = h3 * hbar3 in the unscaled ring."""
    return Poly.monomial(q=3 * power, hbar3=power)


def body_term(
    coeff: Scalar = 1, gamma: int = 0, r2: int = 0, z: Optional[Mapping[int, int]] = None
) -> Poly:
    """A single term of a balanced body: coeff * gamma^gamma * (r^2)^r2 * prod z_j^e."""
    return Poly.monomial(coeff, gamma=gamma, hbar3=r2, h=z)


class BalancedPoly(NamedTuple):
    """h3^(prefactor_thirds/3) times a body in z_4..z_N, r^2 and gamma."""

    prefactor_thirds: int
    body: Poly


class Grading(NamedTuple):
    """Gradings of a balanced body; ``None`` means not homogeneous."""

    order: int
    weight: Optional[int]
    degree: Optional[int]


def _residual(key: MonomialKey) -> int:
    return key.e_q + key.h_order - 3 * key.e_hbar3


def to_balanced(p: Poly, expected_thirds: Optional[int] = None) -> BalancedPoly:
    """
    Factor ``p`` as h3^(k/3) * body(z, r^2, gamma).

    Args:
        p: An unscaled polynomial.
        expected_thirds: If given, the prefactor every monomial must carry;
            also used as the prefactor of the zero polynomial.

    Raises:
        StrayConjugate: If the hbar3-free monomials agree on a prefactor and an
            hbar3-bearing monomial does not.
        MixedPrefactor: For any other disagreement.
    """
    residuals: Dict[int, List[MonomialKey]] = {}
    for key, _ in p.raw_items():
        residuals.setdefault(_residual(key), []).append(key)

    if not residuals:
        return BalancedPoly(expected_thirds or 0, Poly.zero())

    if len(residuals) > 1:
        plain = {k for k, keys in residuals.items() if any(not key.e_hbar3 for key in keys)}
        if len(plain) == 1:
            (consensus,) = plain
            stray = [key for k, keys in residuals.items() if k != consensus for key in keys]
            raise StrayConjugate(
                f"hbar3 monomials {stray} do not pair with h3 consistently with prefactor {consensus}/3"
            )
        raise MixedPrefactor(f"monomials carry different prefactors (thirds): {sorted(residuals)}")

    (k,) = residuals
    if expected_thirds is not None and k != expected_thirds:
        raise MixedPrefactor(f"prefactor {k}/3 differs from the expected {expected_thirds}/3")

    body = {MonomialKey(key.e_gamma, 0, key.e_hbar3, key.e_h): coeff for key, coeff in p.raw_items()}
    return BalancedPoly(k, Poly._wrap(body))


def from_balanced(bp: BalancedPoly) -> Poly:
    """Inverse of :func:`to_balanced`."""
    k, body = bp
    out = {}
    for key, coeff in body.raw_items():
        if key.e_q:
            raise ValueError(f"balanced body has residual q-power in {key}")
        out[MonomialKey(key.e_gamma, k + 3 * key.e_hbar3 - key.h_order, key.e_hbar3, key.e_h)] = coeff
    return Poly._wrap(out)


def grading(p: Union[BalancedPoly, Poly]) -> Grading:
    """
    Order, spectral weight and z-degree of a balanced body.

    The order is the largest z-index present. weight(z_j) = j - 3 while r^2
    and gamma have weight 0.
    """
    body = p.body if isinstance(p, BalancedPoly) else p
    order = 0
    weights = set()
    degrees = set()
    for key, _ in body.raw_items():
        if key.e_h:
            order = max(order, key.e_h[-1][0])
        weights.add(sum((j - 3) * e for j, e in key.e_h))
        degrees.add(sum(e for _, e in key.e_h))
    weight = weights.pop() if len(weights) == 1 else None
    degree = degrees.pop() if len(degrees) == 1 else None
    return Grading(order, weight, degree)
