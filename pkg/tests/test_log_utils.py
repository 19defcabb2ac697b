import io
import logging
from unittest.mock import patch

from mlag.killing_fields import log_utils


def test_logging_setup():
    with patch("mlag.killing_fields.log_utils.logger.hasHandlers", return_value=False):
        log_utils.setup_logging(debug=False)

        # Check if the logger has handlers
        assert len(log_utils.logger.handlers) == 2


def test_logging_info_stream():
    """Progress goes to the given stream so stdout stays free for payloads."""
    stream = io.StringIO()
    with patch("mlag.killing_fields.log_utils.logger.hasHandlers", return_value=False):
        log_utils.setup_logging(debug=True, info_stream=stream)

    assert log_utils.logger.level == logging.DEBUG
    log_utils.logger.debug("extended table")
    log_utils.logger.warning("not on the info stream")
    assert "[DEBUG] extended table" in stream.getvalue()
    assert "not on the info stream" not in stream.getvalue()
