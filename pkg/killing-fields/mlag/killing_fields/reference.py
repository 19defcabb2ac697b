"""
Published coefficient tables, loaded from YAML and compared against computed states.

Each entry is keyed by ansatz and coefficient name (e.g. ``p4: b5``) and holds
the balanced form as an overall scale (``re``/``im``, ``gamma``), the h3
prefactor in thirds and a body listed as ``[coefficient, {zN: exponent}]`` pairs.
"""

import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple

import yaml

from mlag.killing_fields.exact_ring import BalancedPoly, GaussianRational, Poly, body_term, from_balanced
from mlag.killing_fields.killing_engine import KillingState
from mlag.killing_fields.log_utils import logger
from mlag.killing_fields.verifier import CheckReport

NAME_PATTERN = re.compile(r"^([pbcfagst])(\d+)$")


def load_reference_table(yaml_path: str) -> Dict[str, Any]:
    """
    Loads a YAML reference table.

    Args:
        yaml_path (str): Path to the YAML table.

    Returns:
        Dict[str, Any]: Mapping ansatz -> coefficient name -> entry.

    Raises:
        FileNotFoundError: If file does not exist.
        ValueError: If YAML is invalid or not a mapping.
    """
    path = Path(yaml_path)

    if not path.exists():
        logger.error(f"Reference YAML not found at {yaml_path}")
        raise FileNotFoundError(f"Reference table YAML not found at {yaml_path}")

    try:
        with path.open("r", encoding="utf-8") as f:
            table = yaml.safe_load(f)
    except yaml.YAMLError as e:
        logger.error("YAML parsing error")
        raise ValueError(f"Invalid YAML in reference table: {e}")

    if not isinstance(table, dict):
        logger.error(f"Reference table {yaml_path} is not a mapping")
        raise ValueError(f"Reference table must map ansatz names to coefficients, got {type(table).__name__}")
    return table


def _rational(value: Any) -> Fraction:
    return Fraction(str(value))


def parse_reference_entry(name: str, entry: Mapping[str, Any]) -> Tuple[str, int, Poly]:
    """
    Turn one table entry into (component, lambda-degree, unscaled polynomial).

    Raises:
        ValueError: If the name or the entry is malformed.
    """
    match = NAME_PATTERN.match(name)
    if not match:
        raise ValueError(f"Reference coefficient name '{name}' is not a component letter and index")
    component, index = match.group(1), int(match.group(2))

    try:
        scale = GaussianRational(_rational(entry.get("re", 0)), _rational(entry.get("im", 0)))
        gamma = int(entry.get("gamma", 0))
        thirds = int(entry["thirds"])
        body = Poly.zero()
        for coeff, monomial in entry["body"]:
            z = {int(var.lstrip("z")): int(e) for var, e in (monomial or {}).items()}
            body = body + body_term(scale * _rational(coeff), gamma=gamma, z=z)
    except (KeyError, TypeError, ValueError) as e:
        logger.error(f"Malformed reference entry '{name}': {e}")
        raise ValueError(f"Malformed reference entry '{name}': {e}")

    return component, index - 2, from_balanced(BalancedPoly(thirds, body))


def _by_index(name: str) -> Tuple[int, str]:
    match = NAME_PATTERN.match(name)
    return (int(match.group(2)) if match else 0), name


def compare_with_reference(state: KillingState, table: Mapping[str, Any]) -> List[CheckReport]:
    """
    One report per tabulated coefficient of the state's ansatz.

    A coefficient that was not computed fails with the expected value as witness.
    """
    ansatz = state.ansatz.value
    entries = table.get(ansatz) or {}
    if not entries:
        logger.warning(f"Reference table has no entries for {ansatz}")

    reports = []
    for name in sorted(entries, key=_by_index):
        component, degree, expected = parse_reference_entry(name, entries[name])
        if not state.components.has(component, degree):
            reports.append(CheckReport("reference", name, "fail", expected, detail="not computed"))
            continue
        residue = state.coefficient(component, degree) - expected
        status = "fail" if residue else "pass"
        reports.append(CheckReport("reference", name, status, residue or None, detail="printed value"))
    logger.debug(f"Compared {len(reports)} {ansatz} coefficient(s) with the reference table")
    return reports
