"""
This module provides functions for initializing and configuring logging in grandnorm.

Functions:
- init_logging(file_handler: bool = False) -> str | None: Initializes the logging configuration.
- set_logging_levels(levels: LoggingLevels): Sets the grandnorm log level and numpy error mode together.
- set_grandnorm_log_level(level: int | str) -> None: Sets the log level for grandnorm.
- set_numpy_error_mode(mode: str) -> None: Sets how numpy reports floating-point errors.

Console output goes to stderr so that reports written to stdout stay machine-readable.
"""

import logging
import logging.handlers
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

LOG_FILENAME = "grandnorm.log"
LOG_SIZE = 1024 * 1024 * 10  # 10 MB
LOG_BACKUP_COUNT = 5
LOG_DEFAULT_LEVEL = logging.WARNING
LOG_FORMAT = "{asctime} {levelname} {threadName} {name}.{funcName}.{lineno} {message}"
NUMPY_ERROR_MODES = ("ignore", "warn", "raise", "call", "print", "log")

HANDLER_NAMES = ("grandnorm.console", "grandnorm.file")


@dataclass
class LoggingLevels:
    grandnorm: int | str = LOG_DEFAULT_LEVEL
    numpy_errors: str = "ignore"


def _get_logs_dir() -> str:
    """
    Returns the directory path where logs should be stored.

    Returns:
        str: The directory path where logs should be stored.
    """
    return str(Path.home() / ".grandnorm" / "logs")


def _build_handlers(logs_dir: str | None) -> list[logging.Handler]:
    formatter = logging.Formatter(LOG_FORMAT, style="{")
    console = logging.StreamHandler(sys.stderr)
    console.set_name("grandnorm.console")
    handlers: list[logging.Handler] = [console]
    if logs_dir is not None:
        rotating = logging.handlers.RotatingFileHandler(
            Path(logs_dir) / LOG_FILENAME, maxBytes=LOG_SIZE, backupCount=LOG_BACKUP_COUNT, encoding="utf-8"
        )
        rotating.set_name("grandnorm.file")
        handlers.append(rotating)
    for handler in handlers:
        handler.setFormatter(formatter)
    return handlers


def init_logging(file_handler: bool = False) -> str | None:
    """
    Installs the grandnorm handlers on the root logger, replacing any installed by an earlier call.

    Args:
        file_handler (bool, optional): Also write a rotating log file under ~/.grandnorm/logs.
            Defaults to False.

    Returns:
        logs_dir (str): The log directory when file_handler is True, otherwise None.
    """
    root = logging.getLogger()
    for handler in [h for h in root.handlers if h.get_name() in HANDLER_NAMES]:
        root.removeHandler(handler)
        handler.close()

    logs_dir = None
    if file_handler:
        logs_dir = _get_logs_dir()
        Path(logs_dir).mkdir(parents=True, exist_ok=True)
    for handler in _build_handlers(logs_dir):
        root.addHandler(handler)

    logging.captureWarnings(True)
    set_grandnorm_log_level(LOG_DEFAULT_LEVEL)
    # log-space evaluation takes logs of zero samples on purpose
    set_numpy_error_mode("ignore")
    root.info(f"logging to stderr{f' and {logs_dir}' if logs_dir else ''}")
    return logs_dir


def set_logging_levels(levels: LoggingLevels) -> None:
    set_grandnorm_log_level(levels.grandnorm)
    set_numpy_error_mode(levels.numpy_errors)


def set_grandnorm_log_level(level: int | str) -> None:
    """
    Set the log level for grandnorm.

    Args:
        level (int | str): The log level to be set, as a number or a level name.

    Returns:
        None
    """
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"unknown log level: {level}")
        level = resolved
    logging.getLogger().setLevel(level)


def set_numpy_error_mode(mode: str) -> None:
    """
    Set how numpy handles floating-point errors (divide, overflow, underflow, invalid).

    Args:
        mode (str): One of NUMPY_ERROR_MODES.

    Returns:
        None
    """
    if mode not in NUMPY_ERROR_MODES:
        raise ValueError(f"unknown numpy error mode: {mode}")
    np.seterr(all=mode)
