"""
Artifact and cache files for computed Killing fields.

Artifacts:
- Written atomically (temp file in the same directory, then rename)
- An existing artifact with different content is kept with a '.bak' suffix
- Identical content leaves the file untouched

Cache entries:
- '<key>.json' holds the deterministic state payload
- '<key>.meta.json' holds the package version and creation time
- The key is the sha256 of (ansatz, cycles, schema_version)
"""

import hashlib
import json
import logging
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from mlag.killing_fields import __version__
from mlag.killing_fields.killing_engine import KillingState
from mlag.killing_fields.serialization import SCHEMA_VERSION, dumps_state, loads_state

BACKUP_SUFFIX = ".bak"
META_SUFFIX = ".meta.json"

logger = logging.getLogger(__name__)


def write_artifact(path: Path, content: str, backup: Optional[bool] = True) -> bool:
    """
    Atomically write ``content`` to ``path``.

    Args:
        path: Destination file; parent directories are created.
        content: Text to write.
        backup: Keep a differing existing file as '<name>.bak'.

    Returns:
        True if the file was written, False if it already held ``content``.

    Raises:
        OSError: If the file cannot be written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if path.exists():
        if path.read_text() == content:
            logger.debug(f"Artifact '{path}' is already up to date.")
            return False
        if backup:
            backup_path = path.with_suffix(path.suffix + BACKUP_SUFFIX)
            try:
                os.replace(path, backup_path)
                logger.info(f"Backed up existing artifact '{path.name}' to '{backup_path.name}'")
            except OSError as e:
                logger.error(f"Cannot back up artifact '{path}' ({e})")
                raise

    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(content)
        os.replace(tmp_name, path)
    except OSError as e:
        logger.error(f"Cannot write artifact '{path}' ({e})")
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.info(f"Wrote artifact '{path}'")
    return True


def cache_key(ansatz: str, cycles: int, schema_version: int = SCHEMA_VERSION) -> str:
    material = json.dumps({"ansatz": ansatz, "cycles": cycles, "schema_version": schema_version}, sort_keys=True)
    return hashlib.sha256(material.encode()).hexdigest()


class StateCache:
    """Content-addressed store of serialized states under one directory."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def path_for(self, ansatz: str, cycles: int) -> Path:
        return self.directory / f"{cache_key(ansatz, cycles)}.json"

    def load(self, ansatz: str, cycles: int) -> Optional[KillingState]:
        """
        The cached state, or None when there is no entry.

        Raises:
            ValueError: If the entry exists but cannot be parsed.
        """
        path = self.path_for(ansatz, cycles)
        if not path.exists():
            logger.debug(f"No cache entry for {ansatz} with {cycles} cycle(s)")
            return None
        state = loads_state(path.read_text())
        if state.ansatz.value != ansatz or state.cycles_done != cycles:
            logger.error(f"Cache entry '{path.name}' holds {state.ansatz.value}/{state.cycles_done}")
            raise ValueError(f"cache entry '{path}' does not match {ansatz} with {cycles} cycle(s)")
        logger.debug(f"Loaded cache entry '{path.name}'")
        return state

    def store(self, state: KillingState) -> Path:
        path = self.path_for(state.ansatz.value, state.cycles_done)
        write_artifact(path, dumps_state(state), backup=False)
        meta = {
            "version": __version__,
            "created": datetime.now(timezone.utc).isoformat(),
            "ansatz": state.ansatz.value,
            "cycles": state.cycles_done,
        }
        meta_path = path.with_name(path.stem + META_SUFFIX)
        write_artifact(meta_path, json.dumps(meta, indent=2, sort_keys=True) + "\n", backup=False)
        return path

    def discard(self, ansatz: str, cycles: int) -> None:
        path = self.path_for(ansatz, cycles)
        for candidate in (path, path.with_name(path.stem + META_SUFFIX)):
            if candidate.exists():
                candidate.unlink()
        logger.warning(f"Discarded cache entry '{path.name}'")
