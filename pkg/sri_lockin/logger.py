#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
"""SRI Lock-in - console & file logging.

Progress (INFO/DEBUG) can be copied to stdout, warnings & errors always go to
stderr, and an optional log file receives everything at the package level.
"""

import logging
import logging.handlers
import sys
from typing import Optional

from .const import __dev_mode__
from .schema import LOG_FILE_NAME, LOG_ROTATE_BYTES, LOG_ROTATE_COUNT

DEV_MODE = __dev_mode__ and False

PACKAGE_LOGGER = "sri_lockin"

TIME_FMT = "%H:%M:%S"
CONSOLE_FMT = "%(asctime)s %(levelname)-7s %(message)s"
FILE_FMT = "%(asctime)s.%(msecs)03d %(levelname)-7s %(name)s: %(message)s"

LOG_COLOURS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "bold_red",
}

try:
    import colorlog
except ModuleNotFoundError:
    colorlog = None

_LOGGER = logging.getLogger(__name__)
if DEV_MODE:
    _LOGGER.setLevel(logging.DEBUG)


class LevelBand(logging.Filter):
    """Pass only records with lo <= levelno < hi."""

    def __init__(self, lo: int = logging.NOTSET, hi: int = logging.CRITICAL + 1):
        super().__init__()
        self.lo, self.hi = lo, hi

    def filter(self, record) -> bool:
        return self.lo <= record.levelno < self.hi


def _console_formatter() -> logging.Formatter:
    if colorlog is None:
        return logging.Formatter(fmt=CONSOLE_FMT, datefmt=TIME_FMT)
    return colorlog.ColoredFormatter(
        f"%(log_color)s{CONSOLE_FMT}",
        datefmt=TIME_FMT,
        reset=True,
        log_colors=LOG_COLOURS,
    )


def _stream_handler(stream, band: LevelBand, fmt: logging.Formatter):
    handler = logging.StreamHandler(stream=stream)
    handler.setFormatter(fmt)
    handler.addFilter(band)
    return handler


def _file_handler(
    file_name: str, rotate_bytes: Optional[int], rotate_backups: Optional[int]
) -> logging.Handler:
    """Size-rotated if rotate_bytes, else rotated at midnight if rotate_backups."""

    if rotate_bytes:
        return logging.handlers.RotatingFileHandler(
            file_name, maxBytes=rotate_bytes, backupCount=rotate_backups or 2
        )
    if rotate_backups:
        return logging.handlers.TimedRotatingFileHandler(
            file_name, when="midnight", backupCount=rotate_backups
        )
    return logging.FileHandler(file_name)


def set_logging(
    logger: Optional[logging.Logger] = None,
    level: int = logging.WARNING,
    cc_stdout: bool = False,
    **kwargs,
) -> None:
    """(Re)configure the package logger; kwargs are the run config's log section.

    Any handlers from an earlier call are replaced.
    """

    logger = logger or logging.getLogger(PACKAGE_LOGGER)
    logger.propagate = False
    logger.setLevel(level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    fmt = _console_formatter()
    errors = LevelBand(lo=logging.WARNING)
    logger.addHandler(_stream_handler(sys.stderr, errors, fmt))
    if cc_stdout:
        progress = LevelBand(hi=logging.WARNING)
        logger.addHandler(_stream_handler(sys.stdout, progress, fmt))

    file_name = kwargs.get(LOG_FILE_NAME)
    if not file_name:
        return

    handler = _file_handler(
        file_name, kwargs.get(LOG_ROTATE_BYTES), kwargs.get(LOG_ROTATE_COUNT)
    )
    handler.setFormatter(logging.Formatter(fmt=FILE_FMT))
    logger.addHandler(handler)
    _LOGGER.debug("logging to %s", file_name)
