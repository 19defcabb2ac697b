# tests/conftest.py
import logging
import shutil
import sys
from pathlib import Path

import pytest

# Add the source directory to the import path
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "killing-fields"))

from mlag.killing_fields.derivations import Derivations  # noqa: E402
from mlag.killing_fields.killing_engine import run  # noqa: E402
from mlag.killing_fields.loop_matrix import Ansatz  # noqa: E402

REFERENCE_SOURCE = Path(__file__).parent.parent / "data/printed-coefficients.yaml"


@pytest.fixture
def ring():
    """A derivation ring with room for two cycles."""
    return Derivations(24)


@pytest.fixture(scope="session")
def p4_state():
    """X(p4) through one cycle, shared by the whole session."""
    return run(Ansatz.P4, 1)


@pytest.fixture(scope="session")
def a5_state():
    """X(a5) through one cycle, shared by the whole session."""
    return run(Ansatz.A5, 1)


@pytest.fixture
def reference_file(tmp_path):
    """Fixture to copy the published coefficient table to a temp file."""
    reference_path = tmp_path / "printed-coefficients.yaml"
    shutil.copy(REFERENCE_SOURCE, reference_path)
    yield reference_path


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch):
    """Keep user config files and environment out of CLI tests."""
    monkeypatch.setattr("mlag.killing_fields.main.DEFAULT_CONFIG_FILES", [])
    monkeypatch.delenv("MLAG_KILLING_FIELDS_CACHE_DIR", raising=False)
    monkeypatch.delenv("MLAG_KILLING_FIELDS_DEBUG", raising=False)


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop handlers installed by setup_logging so each test starts clean."""
    yield
    logger = logging.getLogger("mlag.killing_fields")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
