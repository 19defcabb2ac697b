"""
lambda-graded components of an sl(3) formal Killing field.

A Killing field is stored as eight series p, b, c, f, a, g, s, t in the loop
parameter lambda. They assemble into the trace-free 3x3 matrix

    [ -2i a            b+f+g-s        i(b-f+g+s) ]
    [ -b+f+g+s         i(c+a-t)       -p+c+t     ]
    [ -i(b+f-g+s)      p+c+t          i(a-c+t)   ]

whose characteristic polynomial det(mu I + X) = mu^3 + sigma2 mu + det3 is
computed in closed form; cofactor expansions are kept as oracles.
"""

import enum
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from mlag.killing_fields.exact_ring import I, GaussianRational, Poly

COMPONENTS = ("p", "b", "c", "f", "a", "g", "s", "t")


class Ansatz(str, enum.Enum):
    """The two canonical towers: seeded by the pseudo-Jacobi field z_4 or the Jacobi field z_5 - 5/3 z_4^2."""

    P4 = "p4"
    A5 = "a5"


# lambda-degree of the first coefficient of each component; the support steps by 6
DEGREE_OFFSETS: Dict[Ansatz, Dict[str, int]] = {
    Ansatz.P4: {"p": 2, "b": 3, "c": 3, "f": 4, "a": 5, "g": 0, "s": 1, "t": 1},
    Ansatz.A5: {"p": 0, "b": 1, "c": 1, "f": 2, "a": 3, "g": 4, "s": 5, "t": 5},
}

PERIOD = 6


class LambdaSeries:
    """Sparse map from lambda-degree to Poly. A stored zero means 'computed and equal to zero'."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[int, Poly]] = None):
        checked = {}
        for degree, poly in (coeffs or {}).items():
            if not isinstance(degree, int) or degree < 0:
                raise ValueError(f"lambda-degree must be a non-negative integer, got {degree!r}")
            if not isinstance(poly, Poly):
                raise TypeError(f"coefficient at lambda^{degree} must be a Poly")
            checked[degree] = poly
        self._coeffs = checked

    def coefficient(self, degree: int) -> Poly:
        return self._coeffs.get(degree, Poly.zero())

    def degrees(self) -> List[int]:
        """All stored degrees, including computed zeros."""
        return sorted(self._coeffs)

    def support(self) -> List[int]:
        return [d for d in sorted(self._coeffs) if self._coeffs[d]]

    def __contains__(self, degree: int) -> bool:
        return degree in self._coeffs

    def items(self) -> Iterator[Tuple[int, Poly]]:
        return iter(sorted(self._coeffs.items()))

    def with_coefficient(self, degree: int, poly: Poly) -> "LambdaSeries":
        coeffs = dict(self._coeffs)
        coeffs[degree] = poly
        return LambdaSeries(coeffs)

    def _combine(self, other: "LambdaSeries", sign: int) -> "LambdaSeries":
        out = {d: p for d, p in self._coeffs.items() if p}
        for d, p in other._coeffs.items():
            total = out.get(d, Poly.zero()) + (p if sign > 0 else -p)
            if total:
                out[d] = total
            else:
                out.pop(d, None)
        return LambdaSeries(out)

    def __add__(self, other: "LambdaSeries") -> "LambdaSeries":
        return self._combine(other, 1)

    def __sub__(self, other: "LambdaSeries") -> "LambdaSeries":
        return self._combine(other, -1)

    def __neg__(self) -> "LambdaSeries":
        return LambdaSeries({d: -p for d, p in self._coeffs.items() if p})

    def scale(self, value) -> "LambdaSeries":
        out = {d: p * value for d, p in self._coeffs.items()}
        return LambdaSeries({d: p for d, p in out.items() if p})

    def __mul__(self, other):
        if not isinstance(other, LambdaSeries):
            return self.scale(other)
        out: Dict[int, Poly] = {}
        for d1, p1 in self._coeffs.items():
            if not p1:
                continue
            for d2, p2 in other._coeffs.items():
                if p2:
                    out[d1 + d2] = out.get(d1 + d2, Poly.zero()) + p1 * p2
        return LambdaSeries({d: p for d, p in out.items() if p})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, LambdaSeries):
            return NotImplemented
        return self.nonzero() == other.nonzero()

    def nonzero(self) -> Dict[int, Poly]:
        return {d: p for d, p in self._coeffs.items() if p}

    def __bool__(self):
        return any(self._coeffs.values())

    def __repr__(self):
        inner = ", ".join(f"{d}: {p}" for d, p in self.items())
        return f"LambdaSeries({{{inner}}})"

    @classmethod
    def unit(cls) -> "LambdaSeries":
        return cls({0: Poly.one()})


def lambda_coeff(series: LambdaSeries, d: int) -> Poly:
    """The coefficient of lambda^d, zero if absent."""
    if d < 0:
        raise ValueError(f"lambda-degree must be non-negative, got {d}")
    return series.coefficient(d)


def product_coefficient(factors: Sequence[LambdaSeries], d: int) -> Poly:
    """The lambda^d coefficient of the product of ``factors``."""
    if not factors:
        return Poly.one() if d == 0 else Poly.zero()
    head, rest = factors[0], factors[1:]
    total = Poly.zero()
    for d1, p1 in head.items():
        if d1 > d or not p1:
            continue
        if not rest:
            if d1 == d:
                total = total + p1
            continue
        tail = product_coefficient(rest, d - d1)
        if tail:
            total = total + p1 * tail
    return total


@dataclass(frozen=True)
class KillingComponents:
    """The eight component series of one ansatz; supports are checked against its degree progression."""

    ansatz: Ansatz
    p: LambdaSeries = field(default_factory=LambdaSeries)
    b: LambdaSeries = field(default_factory=LambdaSeries)
    c: LambdaSeries = field(default_factory=LambdaSeries)
    f: LambdaSeries = field(default_factory=LambdaSeries)
    a: LambdaSeries = field(default_factory=LambdaSeries)
    g: LambdaSeries = field(default_factory=LambdaSeries)
    s: LambdaSeries = field(default_factory=LambdaSeries)
    t: LambdaSeries = field(default_factory=LambdaSeries)

    def __post_init__(self):
        object.__setattr__(self, "ansatz", Ansatz(self.ansatz))
        offsets = DEGREE_OFFSETS[self.ansatz]
        for name in COMPONENTS:
            for degree in self.component(name).degrees():
                if degree % PERIOD != offsets[name] % PERIOD or degree < offsets[name]:
                    raise ValueError(
                        f"{name} at lambda^{degree} is off the {self.ansatz.value} progression "
                        f"{offsets[name]} + {PERIOD}k"
                    )

    def component(self, name: str) -> LambdaSeries:
        if name not in COMPONENTS:
            raise KeyError(f"unknown Killing component '{name}'")
        return getattr(self, name)

    def has(self, name: str, degree: int) -> bool:
        return degree in self.component(name)

    def coefficient(self, name: str, degree: int) -> Poly:
        return self.component(name).coefficient(degree)

    def with_coefficient(self, name: str, degree: int, poly: Poly) -> "KillingComponents":
        return replace(self, **{name: self.component(name).with_coefficient(degree, poly)})

    def coefficients(self) -> Iterator[Tuple[str, int, Poly]]:
        """(name, lambda-degree, coefficient) for every stored coefficient, by degree then component."""
        rows = [
            (d, COMPONENTS.index(name), name, poly) for name in COMPONENTS for d, poly in self.component(name).items()
        ]
        for d, _, name, poly in sorted(rows, key=lambda row: row[:2]):
            yield name, d, poly


Matrix = List[List[LambdaSeries]]


def assemble(kc: KillingComponents) -> Matrix:
    """The 3x3 matrix of lambda-series; always trace-free."""
    p, b, c, f, a, g, s, t = (kc.component(name) for name in COMPONENTS)
    return [
        [a.scale(-2 * I), b + f + g - s, (b - f + g + s).scale(I)],
        [-b + f + g + s, (c + a - t).scale(I), -p + c + t],
        [(b + f - g + s).scale(-I), p + c + t, (a - c + t).scale(I)],
    ]


# (integer coefficient, factors) of the closed forms; det3 carries an overall factor i
DET3_TERMS: Tuple[Tuple[int, str], ...] = (
    (4, "gsp"),
    (-4, "fga"),
    (-4, "bbc"),
    (-4, "fft"),
    (4, "ggc"),
    (4, "sst"),
    (2, "aaa"),
    (-2, "app"),
    (8, "act"),
    (-4, "bsa"),
    (4, "bfp"),
)

SIGMA2_TERMS: Tuple[Tuple[int, str], ...] = (
    (3, "aa"),
    (1, "pp"),
    (-4, "ct"),
    (-4, "bs"),
    (-4, "fg"),
)

CLOSED_FORMS = {"det3": (DET3_TERMS, I), "sigma2": (SIGMA2_TERMS, GaussianRational(1))}


def _closed_form(kc: KillingComponents, which: str, degrees: Optional[Iterable[int]]) -> LambdaSeries:
    terms, overall = CLOSED_FORMS[which]
    if degrees is None:
        total = LambdaSeries()
        for coeff, names in terms:
            product = LambdaSeries.unit()
            for name in names:
                product = product * kc.component(name)
            total = total + product.scale(overall * coeff)
        return total
    out = {}
    for d in degrees:
        value = Poly.zero()
        for coeff, names in terms:
            value = value + product_coefficient([kc.component(name) for name in names], d) * coeff
        value = value * overall
        if value:
            out[d] = value
    return LambdaSeries(out)


def det3(kc: KillingComponents, degrees: Optional[Iterable[int]] = None) -> LambdaSeries:
    """
    det X = i(4gsp - 4fga - 4b^2c - 4f^2t + 4g^2c + 4s^2t + 2a^3 - 2ap^2 + 8act - 4bsa + 4bfp).

    Args:
        degrees: Restrict the computation to these lambda-degrees (default: all).
    """
    return _closed_form(kc, "det3", degrees)


def sigma2(kc: KillingComponents, degrees: Optional[Iterable[int]] = None) -> LambdaSeries:
    """sigma2 = 3a^2 + p^2 - 4ct - 4bs - 4fg, the sum of the principal 2x2 minors."""
    return _closed_form(kc, "sigma2", degrees)


def _det2(m: Matrix, rows: Tuple[int, int], cols: Tuple[int, int]) -> LambdaSeries:
    (r1, r2), (c1, c2) = rows, cols
    return m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]


def det3_cofactor(kc: KillingComponents) -> LambdaSeries:
    """det3 by cofactor expansion of the assembled matrix along the first row."""
    m = assemble(kc)
    return (
        m[0][0] * _det2(m, (1, 2), (1, 2))
        - m[0][1] * _det2(m, (1, 2), (0, 2))
        + m[0][2] * _det2(m, (1, 2), (0, 1))
    )


def sigma2_minors(kc: KillingComponents) -> LambdaSeries:
    """sigma2 as the sum of the three principal 2x2 minors."""
    m = assemble(kc)
    return _det2(m, (0, 1), (0, 1)) + _det2(m, (0, 2), (0, 2)) + _det2(m, (1, 2), (1, 2))


def trace(kc: KillingComponents) -> LambdaSeries:
    m = assemble(kc)
    return m[0][0] + m[1][1] + m[2][2]


MuPoly = List[LambdaSeries]


def _mu_add(x: MuPoly, y: MuPoly, sign: int = 1) -> MuPoly:
    size = max(len(x), len(y))
    x = x + [LambdaSeries()] * (size - len(x))
    y = y + [LambdaSeries()] * (size - len(y))
    return [xi + yi if sign > 0 else xi - yi for xi, yi in zip(x, y)]


def _mu_mul(x: MuPoly, y: MuPoly) -> MuPoly:
    out = [LambdaSeries() for _ in range(len(x) + len(y) - 1)]
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            out[i + j] = out[i + j] + xi * yj
    return out


def char_poly(kc: KillingComponents) -> MuPoly:
    """
    Coefficients [c0, c1, c2, c3] of det(mu I + X) in mu, by cofactor expansion.

    For a trace-free X this is [det3, sigma2, 0, 1].
    """
    m = assemble(kc)
    entry = [
        [[m[i][j], LambdaSeries.unit()] if i == j else [m[i][j]] for j in range(3)] for i in range(3)
    ]

    def minor(r1, r2, c1, c2):
        return _mu_add(_mu_mul(entry[r1][c1], entry[r2][c2]), _mu_mul(entry[r1][c2], entry[r2][c1]), -1)

    result = _mu_mul(entry[0][0], minor(1, 2, 1, 2))
    result = _mu_add(result, _mu_mul(entry[0][1], minor(1, 2, 0, 2)), -1)
    result = _mu_add(result, _mu_mul(entry[0][2], minor(1, 2, 0, 1)))
    return result + [LambdaSeries()] * (4 - len(result))
