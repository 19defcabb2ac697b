# killing-fields/mlag/killing_fields/log_utils.py
"""
Logging utility splitting progress output from warnings and errors.
"""

import logging
import sys
from typing import Optional, TextIO

logger = logging.getLogger("mlag.killing_fields")

LOG_FORMAT = "[%(levelname)s] %(message)s"


def setup_logging(debug: bool = False, info_stream: Optional[TextIO] = None) -> None:
    """
    Configure logging to emit INFO and lower messages to ``info_stream``
    (stdout unless given), and warnings and errors to stderr.

    The command line passes stderr as ``info_stream`` whenever stdout
    carries a JSON or LaTeX payload.
    """
    logger.setLevel(logging.DEBUG if debug else logging.INFO)

    # Avoid adding duplicate handlers
    if logger.hasHandlers():
        return

    info_handler = logging.StreamHandler(info_stream or sys.stdout)
    info_handler.setLevel(logging.DEBUG if debug else logging.INFO)
    info_handler.addFilter(lambda record: record.levelno <= logging.INFO)
    info_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(info_handler)

    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setLevel(logging.WARNING)
    stderr_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(stderr_handler)
