"""Logging setup shared by every omega_width module.

Modules obtain children of the ``omega_width`` logger through
:func:`get_logger`; the CLI calls :func:`configure_logging` once per run.
Search and propagation loops log per-step detail at DEBUG, so the
``quiet_modules`` option lets a verbose run keep those loops at INFO.
"""

import logging
import sys
from collections.abc import Iterable
from pathlib import Path
from typing import Literal

ROOT = "omega_width"

logger = logging.getLogger(ROOT)
logger.propagate = False

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

DEFAULT_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"

_quieted: set[str] = set()


def _handler(
    handler: logging.Handler, level: int, formatter: logging.Formatter
) -> logging.Handler:
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def configure_logging(
    level: LogLevel = "INFO",
    log_file: Path | None = None,
    format_string: str | None = None,
    quiet_modules: Iterable[str] = (),
) -> None:
    """Install stderr (and optional file) handlers on the package logger.

    Calling it again replaces the previous handlers.

    Args:
        level: Threshold for the package logger and its handlers.
        log_file: Also append records to this file; parent directories are
            created as needed.
        format_string: ``logging.Formatter`` format; defaults to
            ``DEFAULT_FORMAT``.
        quiet_modules: Submodule names (``engine.search``) held at INFO or
            above whatever ``level`` says.
    """
    numeric = getattr(logging, level)
    formatter = logging.Formatter(format_string or DEFAULT_FORMAT)

    for old in list(logger.handlers):
        logger.removeHandler(old)
        old.close()
    logger.setLevel(numeric)
    logger.addHandler(_handler(logging.StreamHandler(sys.stderr), numeric, formatter))

    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        logger.addHandler(_handler(file_handler, numeric, formatter))

    names = set(quiet_modules)
    for name in _quieted - names:
        get_logger(name).setLevel(logging.NOTSET)
    _quieted.clear()
    for name in names:
        get_logger(name).setLevel(max(numeric, logging.INFO))
        _quieted.add(name)


def get_logger(name: str) -> logging.Logger:
    """Return the package logger for a module.

    Args:
        name: ``__name__`` of the caller, or a bare submodule name.

    Returns:
        A logger below ``omega_width`` in the hierarchy.
    """
    if name == ROOT or name.startswith(ROOT + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT}.{name}")


# Library use stays quiet until the CLI asks for more
configure_logging("WARNING")
