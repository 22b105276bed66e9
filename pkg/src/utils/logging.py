"""
Logging utilities for liedim.

Library modules log through ``logging.getLogger(__name__)`` and never
configure handlers themselves. The command line calls ``configure_logging``
once, from the settings:
- Human-readable or JSON lines on standard error, so reports on standard
  output stay clean
- An optional rotating log file for long sweeps
"""
import json
import logging
import logging.handlers
import os
import sys
import traceback
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

DEFAULT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# LogRecord attributes that are not user supplied ``extra`` fields
_RECORD_KEYS = frozenset(vars(logging.LogRecord('', 0, '', 0, '', None, None))) | {'message', 'asctime'}


def _json_default(value: Any) -> Any:
    # Lattices, invariants and reports carry a to_dict; everything else is printed
    to_dict = getattr(value, 'to_dict', None)
    if callable(to_dict):
        return to_dict()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    return str(value)


class JsonFormatter(logging.Formatter):
    """
    Formatter that outputs one JSON object per log record.

    ``extra`` fields passed to the logger (ranks, degrees, sweep counts,
    even a Lattice) are copied into the object next to the message.
    """
    def __init__(self, indent: Optional[int] = None, prefix: str = ''):
        super().__init__()
        self.indent = indent
        self.prefix = prefix

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            'timestamp': datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            'elapsed_seconds': round(record.relativeCreated / 1000.0, 3),
            'level': record.levelname,
            'name': record.name,
            'message': record.getMessage(),
            'location': f"{record.module}:{record.lineno}",
        }
        entry.update({k: v for k, v in record.__dict__.items() if k not in _RECORD_KEYS})

        if record.exc_info and record.exc_info[0] is not None:
            exc_type, exc, tb = record.exc_info
            entry['exception'] = {
                'type': exc_type.__name__,
                'message': str(exc),
                'traceback': _frames(tb),
            }
        if record.stack_info:
            entry['stack_info'] = record.stack_info

        return self.prefix + json.dumps(entry, default=_json_default, indent=self.indent)


def _frames(tb) -> List[Dict[str, Any]]:
    return [
        {'filename': frame.filename, 'name': frame.name, 'lineno': frame.lineno}
        for frame in traceback.extract_tb(tb)
    ]


def configure_logging(
    log_level: Optional[str] = None,
    log_file: Optional[str] = None,
    json_format: bool = False,
    max_bytes: int = 10485760,  # 10 MB
    backup_count: int = 3,
    console_output: bool = True
) -> None:
    """
    Configure the root logger.

    Args:
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL (default LIEDIM_LOG_LEVEL, then WARNING)
        log_file: Rotating log file; none when absent (default LIEDIM_LOG_FILE)
        json_format: One JSON object per line instead of plain text
        max_bytes: Size at which the log file rotates
        backup_count: Rotated files to keep
        console_output: Also log to standard error

    Raises:
        ValueError: If the log level is unknown
    """
    level_name = (log_level or os.getenv('LIEDIM_LOG_LEVEL') or 'WARNING').upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        raise ValueError(f"Invalid log level: {level_name}")
    if log_file is None:
        log_file = os.getenv('LIEDIM_LOG_FILE') or None

    handlers: List[logging.Handler] = []
    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        handlers.append(logging.handlers.RotatingFileHandler(
            log_file, maxBytes=max_bytes, backupCount=backup_count
        ))
    if console_output:
        handlers.append(logging.StreamHandler(sys.stderr))

    formatter = JsonFormatter() if json_format else logging.Formatter(DEFAULT_FORMAT)
    for handler in handlers:
        handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.setLevel(level)
    for handler in handlers:
        root_logger.addHandler(handler)

    logging.debug(f"Logging configured: level={level_name}, file={log_file}, json_format={json_format}")


def get_logger(name: str) -> logging.Logger:
    """Logger for ``name``; the handlers come from ``configure_logging``."""
    return logging.getLogger(name)
