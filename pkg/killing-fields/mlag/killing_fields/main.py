#!env python
"""
Formal Killing field CLI

Generates the canonical formal Killing fields X(p4) and X(a5), verifies
them against their defining identities, and prints T_j and obstruction
determinant tables.

Exit codes: 0 success, 1 verification or engine failure, 2 usage error.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import configargparse

from mlag.killing_fields import __version__ as mlag_version
from mlag.killing_fields.artifacts import StateCache, write_artifact
from mlag.killing_fields.derivations import Derivations
from mlag.killing_fields.errors import KillingFieldError
from mlag.killing_fields.killing_engine import KillingState, minimum_tower, run
from mlag.killing_fields.log_utils import logger, setup_logging
from mlag.killing_fields.loop_matrix import Ansatz
from mlag.killing_fields.reference import compare_with_reference, load_reference_table
from mlag.killing_fields.serialization import FORMATS, chi_rows, loads_state, render_state, render_table, tj_rows
from mlag.killing_fields.verifier import ALL_CHECKS, CheckReport, check_killing

COMMANDS = ("generate", "verify", "tables")
TABLES = ("tj", "chi")
DEFAULT_CONFIG_FILES = ["/etc/mlag-killing-fields/config.yaml", "~/.config/mlag-killing-fields.yaml"]
CACHE_DIR_ENV = "MLAG_KILLING_FIELDS_CACHE_DIR"
DEBUG_ENV = "MLAG_KILLING_FIELDS_DEBUG"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _parse_checks(value: str) -> Tuple[str, ...]:
    if value.strip() == "all":
        return ALL_CHECKS
    checks = tuple(c.strip() for c in value.split(",") if c.strip())
    unknown = [c for c in checks if c not in ALL_CHECKS]
    if unknown or not checks:
        raise ValueError(f"unknown checks {unknown or value!r}, expected 'all' or a subset of {ALL_CHECKS}")
    return checks


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one command."""

    ansatz: Ansatz
    cycles: int
    max_tower: int
    format: str = "json"
    checks: Tuple[str, ...] = ALL_CHECKS
    out_path: Optional[Path] = None
    cache_dir: Optional[Path] = None
    input_path: Optional[Path] = None
    reference_path: Optional[Path] = None

    @classmethod
    def from_args(cls, parsed) -> "RunConfig":
        """
        Build a config from parsed arguments; ``max_tower`` defaults to 6 * cycles + 12.

        Raises:
            ValueError: For an unknown ansatz, format or check name.
        """
        cycles = parsed.cycles
        return cls(
            ansatz=Ansatz(parsed.ansatz),
            cycles=cycles,
            max_tower=parsed.max_tower if parsed.max_tower is not None else minimum_tower(max(cycles, 0)),
            format=parsed.format,
            checks=_parse_checks(parsed.checks),
            out_path=Path(parsed.out) if parsed.out else None,
            cache_dir=Path(parsed.cache_dir).expanduser() if parsed.cache_dir else None,
            input_path=Path(parsed.input) if parsed.input else None,
            reference_path=Path(parsed.reference) if parsed.reference else None,
        )

    def validate(self) -> "RunConfig":
        """
        Raises:
            ValueError: If cycles < 0, max_tower < 6 * cycles + 12 or the format is unknown.
        """
        if self.cycles < 0:
            raise ValueError(f"--cycles must be non-negative, got {self.cycles}")
        if self.max_tower < minimum_tower(self.cycles):
            raise ValueError(
                f"--max-tower {self.max_tower} is below {minimum_tower(self.cycles)} for {self.cycles} cycle(s)"
            )
        if self.format not in FORMATS:
            raise ValueError(f"--format must be one of {FORMATS}, got '{self.format}'")
        return self


def _emit(text: str, out_path: Optional[Path]) -> None:
    if out_path:
        write_artifact(out_path, text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _compute(cfg: RunConfig) -> KillingState:
    return run(cfg.ansatz, cfg.cycles, max_tower=cfg.max_tower)


def _cached_state(cfg: RunConfig, reverify: bool) -> KillingState:
    """
    The state for ``cfg``, from the cache when possible.

    With ``reverify`` a cached entry that fails any check is discarded and recomputed.
    """
    if not cfg.cache_dir:
        return _compute(cfg)
    cache = StateCache(cfg.cache_dir)
    try:
        state = cache.load(cfg.ansatz.value, cfg.cycles)
    except ValueError as e:
        logger.warning(f"Ignoring unreadable cache entry: {e}")
        cache.discard(cfg.ansatz.value, cfg.cycles)
        state = None
    if state is not None:
        if not reverify:
            return state
        failed = [r for r in check_killing(state) if not r.passed]
        if not failed:
            logger.debug(f"Cached {cfg.ansatz.value} state re-verified")
            return state
        logger.warning(f"Cached {cfg.ansatz.value} state failed {len(failed)} check(s); recomputing")
        cache.discard(cfg.ansatz.value, cfg.cycles)
    state = _compute(cfg)
    cache.store(state)
    return state


def cmd_generate(cfg: RunConfig) -> int:
    """Compute (or load) a tower and write it in the configured format."""
    state = _cached_state(cfg, reverify=True)
    _emit(render_state(state, cfg.format), cfg.out_path)
    return EXIT_OK


def _log_reports(reports: List[CheckReport]) -> None:
    for report in reports:
        if not report.passed:
            logger.error(f"{report.check} {report.subject} failed: {report.witness}")
    passed = sum(1 for r in reports if r.passed)
    logger.info(f"{passed}/{len(reports)} checks passed")


def cmd_verify(cfg: RunConfig) -> int:
    """Run the selected checks and write one JSON line per report to stdout or ``--out``."""
    if cfg.input_path:
        state = loads_state(cfg.input_path.read_text())
    else:
        state = _cached_state(cfg, reverify=False)

    reports = check_killing(state, checks=cfg.checks)
    if cfg.reference_path:
        reports.extend(compare_with_reference(state, load_reference_table(str(cfg.reference_path))))

    _emit("".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in reports), cfg.out_path)
    _log_reports(reports)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILURE


def cmd_tables(cfg: RunConfig, kind: str, max_j: int, k_from: int, k_to: int) -> int:
    """T_j (both methods, with balanced forms) or obstruction determinants."""
    if kind == "tj":
        if max_j < 3:
            logger.error(f"--max must be at least 3, got {max_j}")
            return EXIT_USAGE
        ring = Derivations(max(cfg.max_tower, max_j - 1, 4))
        rows = tj_rows(ring, max_j)
    elif kind == "chi":
        if k_from < 4 or k_to < k_from:
            logger.error(f"chi table needs 4 <= --from <= --to, got {k_from}..{k_to}")
            return EXIT_USAGE
        rows = chi_rows(k_from, k_to)
    else:
        logger.error(f"tables needs one of {TABLES}, got {kind!r}")
        return EXIT_USAGE

    fmt = "json" if cfg.format == "json" else "text"
    _emit(render_table(rows, fmt), cfg.out_path)
    disagreements = [row for row in rows if not row["agree"]]
    if disagreements:
        logger.error(f"{len(disagreements)} table row(s) disagree between methods")
        return EXIT_FAILURE
    return EXIT_OK


def parse_args(args=None):
    """
    Parse command line arguments, config files and environment.

    Args:
        args: Command line arguments (defaults to None, which uses sys.argv[1:])

    Returns:
        Parsed arguments namespace
    """
    parser = configargparse.ArgumentParser(
        description="Formal Killing field engine version %s" % mlag_version,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        default_config_files=DEFAULT_CONFIG_FILES,
        config_file_parser_class=configargparse.YAMLConfigFileParser,
    )
    parser.add_argument("-c", "--config", is_config_file=True, help="YAML config file path")
    parser.add_argument("command", choices=COMMANDS, help="What to do")
    parser.add_argument("table", nargs="?", choices=TABLES, help="Table kind for the 'tables' command")
    parser.add_argument("--ansatz", choices=[a.value for a in Ansatz], default="p4", help="Seed of the tower")
    parser.add_argument("--cycles", type=int, default=1, help="Number of period-6 cycles")
    parser.add_argument("--max-tower", type=int, default=None, help="Largest h_j index (default 6*cycles+12)")
    parser.add_argument("--format", choices=FORMATS, default="json", help="Output format")
    parser.add_argument("--checks", default="all", help="Comma separated checks or 'all'")
    parser.add_argument("--out", help="Write the output to this file instead of stdout")
    parser.add_argument("--cache-dir", env_var=CACHE_DIR_ENV, help="Directory for cached states")
    parser.add_argument("--input", help="Serialized state to verify instead of computing one")
    parser.add_argument("--reference", help="YAML table of printed coefficients to compare against")
    parser.add_argument("--max", dest="max_j", type=int, default=20, help="Largest j of the T_j table")
    parser.add_argument("--from", dest="k_from", type=int, default=4, help="First k of the chi table")
    parser.add_argument("--to", dest="k_to", type=int, default=30, help="Last k of the chi table")
    parser.add_argument("--debug", action="store_true", env_var=DEBUG_ENV, help="Enable debug logging")
    return parser.parse_args(args)


def main(args=None) -> int:
    """
    Entry point. Parses arguments, validates the configuration and
    dispatches to the command.

    Args:
        args: Command line arguments (defaults to None, which uses sys.argv[1:])

    Returns:
        int: 0 for success, 1 for failure, 2 for usage errors
    """
    try:
        parsed = parse_args(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    # stdout carries the payload unless it goes to a file
    setup_logging(parsed.debug, info_stream=None if parsed.out else sys.stderr)

    try:
        cfg = RunConfig.from_args(parsed).validate()
    except ValueError as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_USAGE

    if parsed.command == "tables" and not parsed.table:
        logger.error("tables needs a table kind: %s", ", ".join(TABLES))
        return EXIT_USAGE

    try:
        if parsed.command == "generate":
            return cmd_generate(cfg)
        if parsed.command == "verify":
            return cmd_verify(cfg)
        return cmd_tables(cfg, parsed.table, parsed.max_j, parsed.k_from, parsed.k_to)
    except (KillingFieldError, ValueError, OSError) as e:
        logger.error("Command '%s' failed: %s", parsed.command, e, exc_info=False)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))  # pragma: no cover
