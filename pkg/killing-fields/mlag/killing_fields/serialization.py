"""
JSON, LaTeX and plain-text renderings of Killing states and tables.

The interchange form is balanced: every coefficient is stored as its h3
prefactor (in thirds) and a body in gamma, r^2 and z_4, z_5, ...
Rationals are written as strings so consumers never lose precision.
"""

import json
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Tuple

from mlag.killing_fields.derivations import Derivations
from mlag.killing_fields.exact_ring import (
    BalancedPoly,
    GaussianRational,
    MonomialKey,
    Poly,
    body_term,
    from_balanced,
    grading,
    to_balanced,
)
from mlag.killing_fields.killing_engine import PREFACTOR_THIRDS, KillingState, superscript
from mlag.killing_fields.loop_matrix import COMPONENTS, Ansatz, KillingComponents
from mlag.killing_fields.verifier import chi, chi_epsilon_sum

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FORMATS = ("json", "latex", "text")


def _monomial_to_dict(key: MonomialKey) -> Dict[str, int]:
    out = {str(j): e for j, e in key.e_h}
    if key.e_hbar3:
        out["r2"] = key.e_hbar3
    return out


def _monomial_from_dict(monomial: Mapping[str, int]) -> Dict[int, int]:
    z = {}
    for var, e in monomial.items():
        if var == "r2":
            continue
        name = var[1:] if var.startswith("z") else var
        if not name.isdigit() or int(name) < 4:
            raise ValueError(f"unknown balanced variable '{var}'")
        z[int(name)] = int(e)
    return z


def body_to_terms(body: Poly) -> List[dict]:
    return [
        {
            "re": str(coeff.re),
            "im": str(coeff.im),
            "gamma": key.e_gamma,
            "monomial": _monomial_to_dict(key),
        }
        for key, coeff in body.terms()
    ]


def body_from_terms(terms: Iterable[Mapping]) -> Poly:
    body = Poly.zero()
    for term in terms:
        coeff = GaussianRational(Fraction(term.get("re", "0")), Fraction(term.get("im", "0")))
        monomial = term.get("monomial", {})
        body = body + body_term(
            coeff, gamma=int(term.get("gamma", 0)), r2=int(monomial.get("r2", 0)), z=_monomial_from_dict(monomial)
        )
    return body


def state_to_payload(state: KillingState) -> dict:
    """The deterministic JSON-ready form of a state; no timestamps or host data."""
    coefficients = []
    for name, d, poly in state.components.coefficients():
        balanced = to_balanced(poly, PREFACTOR_THIRDS[name])
        coefficients.append(
            {
                "name": name,
                "index": superscript(d),
                "lambda_degree": d,
                "prefactor_h3_thirds": balanced.prefactor_thirds,
                "terms": body_to_terms(balanced.body),
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "ansatz": state.ansatz.value,
        "cycles": state.cycles_done,
        "coefficients": coefficients,
    }


def dumps_state(state: KillingState) -> str:
    return json.dumps(state_to_payload(state), indent=2, sort_keys=True) + "\n"


def parse_state(payload: Mapping) -> KillingState:
    """
    Rebuild a state from :func:`state_to_payload` output.

    Raises:
        ValueError: If the payload has the wrong schema version or shape.
    """
    try:
        version = payload["schema_version"]
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version}, expected {SCHEMA_VERSION}")
        kc = KillingComponents(Ansatz(payload["ansatz"]))
        for entry in payload["coefficients"]:
            name = entry["name"]
            if name not in COMPONENTS:
                raise ValueError(f"unknown component '{name}'")
            body = body_from_terms(entry["terms"])
            poly = from_balanced(BalancedPoly(int(entry["prefactor_h3_thirds"]), body))
            kc = kc.with_coefficient(name, int(entry["lambda_degree"]), poly)
        return KillingState.from_components(kc, int(payload["cycles"]))
    except (KeyError, TypeError, AttributeError) as e:
        logger.error(f"Malformed state payload: {e}")
        raise ValueError(f"malformed state payload: {e}") from e


def loads_state(text: str) -> KillingState:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON state: {e}")
        raise ValueError(f"invalid JSON state: {e}") from e
    return parse_state(payload)


# display


def display_terms(body: Poly) -> List[Tuple[MonomialKey, GaussianRational]]:
    # compare vectors of equal length by padding on the high side
    top = max((key.e_h[-1][0] for key, _ in body.raw_items() if key.e_h), default=3)

    def order(item):
        key = item[0]
        exps = dict(key.e_h)
        return tuple(-exps.get(j, 0) for j in range(top, 3, -1)), key.e_hbar3, key.e_gamma

    return sorted(body.raw_items(), key=order)


def _latex_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"\\frac{{{value.numerator}}}{{{value.denominator}}}"


def _text_rational(value: Fraction) -> str:
    return str(value)


def _scalar(coeff: GaussianRational, latex: bool) -> Tuple[str, str]:
    """(sign, magnitude) of a coefficient; magnitude is empty for a unit."""
    fmt = _latex_rational if latex else _text_rational
    unit = "i"
    if coeff.im and coeff.re:
        inner = f"{fmt(coeff.re)} {'-' if coeff.im < 0 else '+'} {fmt(abs(coeff.im))} {unit}"
        return "+", f"({inner})"
    value, suffix = (coeff.re, "") if coeff.re else (coeff.im, unit)
    sign = "-" if value < 0 else "+"
    value = abs(value)
    if value == 1:
        return sign, suffix
    return sign, f"{fmt(value)} {suffix}".strip()


def _factors(key: MonomialKey, latex: bool, gamma_offset: int = 0) -> List[str]:
    out = []
    g = key.e_gamma - gamma_offset
    if g:
        if latex:
            out.append("\\gamma" if g == 1 else f"\\gamma^{{{g}}}")
        else:
            out.append("gamma" if g == 1 else f"gamma^{g}")
    if key.e_hbar3:
        out.append(f"r^{{{2 * key.e_hbar3}}}" if latex else f"r^{2 * key.e_hbar3}")
    for j, e in reversed(key.e_h):
        if latex:
            out.append(f"z_{{{j}}}" if e == 1 else f"z_{{{j}}}^{{{e}}}")
        else:
            out.append(f"z{j}" if e == 1 else f"z{j}^{e}")
    return out


def render_body(body: Poly, latex: bool = True, scale: GaussianRational = None, gamma_offset: int = 0) -> str:
    """A body as a signed sum, after dividing every coefficient by ``scale``."""
    if not body:
        return "0"
    parts = []
    for n, (key, coeff) in enumerate(display_terms(body)):
        if scale is not None:
            coeff = coeff / scale
        sign, magnitude = _scalar(coeff, latex)
        factors = _factors(key, latex, gamma_offset)
        text = " ".join([magnitude] + factors if magnitude else factors) or "1"
        if n == 0:
            parts.append(f"-{text}" if sign == "-" else text)
        else:
            parts.append(f"{sign} {text}")
    return " ".join(parts)


def _prefactor(thirds: int, latex: bool) -> str:
    if not thirds:
        return ""
    if latex:
        if thirds % 3 == 0:
            return f"h_3^{{{thirds // 3}}}"
        sign = "-" if thirds < 0 else ""
        return f"h_3^{{{sign}\\frac{{{abs(thirds)}}}{{3}}}}"
    if thirds % 3 == 0:
        return f"h3^{thirds // 3}"
    return f"h3^({thirds}/3)"


def render_coefficient(name: str, index: int, balanced: BalancedPoly, latex: bool = True) -> str:
    """
    ``name^index = scale * h3^(k/3) * (body)`` with the scale read off the leading display term.

    Parentheses only appear when the scale or the prefactor is nontrivial.
    """
    thirds, body = balanced
    lhs = f"{name}^{{{index}}}" if latex else f"{name}{index}"
    if not body:
        return f"{lhs} = 0"
    lead_key, lead_coeff = display_terms(body)[0]
    gamma = lead_key.e_gamma
    prefactor = _prefactor(thirds, latex)
    trivial_scale = lead_coeff == 1 and not gamma
    if len(body) == 1 and not lead_key.e_h and not lead_key.e_hbar3:
        # a bare scalar times powers of gamma and h3
        sign, magnitude = _scalar(lead_coeff, latex)
        pieces = [magnitude] + _factors(lead_key, latex) + [prefactor]
        text = " ".join(p for p in pieces if p) or "1"
        return f"{lhs} = {'-' if sign == '-' else ''}{text}"
    if trivial_scale and not prefactor:
        return f"{lhs} = {render_body(body, latex)}"
    sign, magnitude = _scalar(lead_coeff, latex)
    scale_key = MonomialKey(gamma, 0, 0, ())
    pieces = [magnitude] + _factors(scale_key, latex) + [prefactor]
    head = " ".join(p for p in pieces if p)
    inner = render_body(body, latex, scale=lead_coeff, gamma_offset=gamma)
    if latex:
        inner = f"\\left( {inner} \\right)"
    else:
        inner = f"({inner})"
    head = f"{'-' if sign == '-' else ''}{head}".strip()
    return f"{lhs} = {head} {inner}" if head else f"{lhs} = {inner}"


def _render_state(state: KillingState, latex: bool) -> str:
    lines = []
    for name, d, poly in state.components.coefficients():
        balanced = to_balanced(poly, PREFACTOR_THIRDS[name])
        lines.append(render_coefficient(name, superscript(d), balanced, latex))
    return "\n".join(lines) + "\n"


def render_latex(state: KillingState) -> str:
    return _render_state(state, latex=True)


def render_text(state: KillingState) -> str:
    return _render_state(state, latex=False)


def render_state(state: KillingState, fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format '{fmt}', expected one of {FORMATS}")
    if fmt == "json":
        return dumps_state(state)
    return render_latex(state) if fmt == "latex" else render_text(state)


# tables


def format_unscaled(p: Poly) -> str:
    """An unscaled polynomial with q^(3m) shown as h3^m, e.g. ``7/2*gamma^2*h4 - 10*h3*hbar3*h4``."""
    if not p:
        return "0"
    parts = []
    for n, (key, coeff) in enumerate(p.terms()):
        factors = []
        if key.e_gamma:
            factors.append("gamma" if key.e_gamma == 1 else f"gamma^{key.e_gamma}")
        if key.e_q:
            power = key.e_q // 3 if key.e_q % 3 == 0 else f"({key.e_q}/3)"
            factors.append("h3" if power == 1 else f"h3^{power}")
        if key.e_hbar3:
            factors.append("hbar3" if key.e_hbar3 == 1 else f"hbar3^{key.e_hbar3}")
        factors.extend(f"h{j}" if e == 1 else f"h{j}^{e}" for j, e in key.e_h)
        sign, magnitude = _scalar(coeff, latex=False)
        text = "*".join(([magnitude.replace(" ", "*")] if magnitude else []) + factors) or "1"
        if n == 0:
            parts.append(f"-{text}" if sign == "-" else text)
        else:
            parts.append(f"{sign} {text}")
    return " ".join(parts)


def tj_rows(ring: Derivations, max_j: int) -> List[dict]:
    """T_3..T_max by both methods, with the balanced form and its spectral weight."""
    rows = []
    for j in range(3, max_j + 1):
        recursive = ring.tj(j)
        closed = ring.tj(j, method="closed")
        row = {"j": j, "T": format_unscaled(recursive), "agree": recursive == closed}
        if j >= 4:
            hat = ring.tj_hat(j)
            row["T_hat"] = render_body(hat.body, latex=False)
            row["weight"] = grading(hat).weight
        rows.append(row)
    return rows


def chi_rows(k_from: int, k_to: int) -> List[dict]:
    rows = []
    for k in range(k_from, k_to + 1):
        det = chi(k)
        eps = chi_epsilon_sum(k)
        rows.append(
            {
                "k": k,
                "chi": str(det),
                "abs_chi": str(abs(det)),
                "epsilon_sum": str(eps),
                "agree": abs(det) == abs(eps),
            }
        )
    return rows


def render_table(rows: List[dict], fmt: str) -> str:
    """JSON lines for ``json``; aligned ``key=value`` lines otherwise."""
    if fmt == "json":
        return "".join(json.dumps(row, sort_keys=True) + "\n" for row in rows)
    return "".join("  ".join(f"{k}={v}" for k, v in row.items()) + "\n" for row in rows)
