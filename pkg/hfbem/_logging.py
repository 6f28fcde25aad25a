import contextlib
import logging
from enum import Enum
from typing import Optional

from hfbem.constants import LOG_CLASS

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s %(message)s"
LOG_DATE_FMT = "%Y-%m-%d %I:%M:%S %p"


class LogLevel(str, Enum):
    CRITICAL = "critical"
    ERROR = "error"
    WARN = "warn"
    INFO = "info"
    DEBUG = "debug"


def logger(name: Optional[str] = LOG_CLASS) -> logging.Logger:
    return logging.getLogger(name=name)


def _file_handler(filename: str) -> logging.FileHandler:
    handler = logging.FileHandler(filename, mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FMT))
    return handler


def init_logging(level: LogLevel, name: Optional[str] = LOG_CLASS, filename: Optional[str] = None):
    logging.basicConfig(format=LOG_FORMAT, datefmt=LOG_DATE_FMT)
    log = logger(name)
    log.setLevel(LogLevel(level).value.upper())
    if filename:
        log.addHandler(_file_handler(filename))
    return log


@contextlib.contextmanager
def log_to_file(filename: str, name: Optional[str] = LOG_CLASS):
    """Copy the package log into filename for the duration of the block."""
    log = logger(name)
    handler = _file_handler(filename)
    log.addHandler(handler)
    try:
        yield log
    finally:
        log.removeHandler(handler)
        handler.close()
