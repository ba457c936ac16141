"""
Logging for penner_closed.

Everything goes to standard error (and optionally a rotating file):
standard output is reserved for JSON reports.
"""

import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Iterable, List, Optional

ROOT_LOGGER = "penner_closed"
BANNER_WIDTH = 70


def _handlers(logging_config, level: int) -> List[logging.Handler]:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if logging_config.file:
        log_file = os.path.expanduser(logging_config.file)
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, mode=0o755, exist_ok=True)
        handlers.append(RotatingFileHandler(
            log_file,
            maxBytes=logging_config.max_size_mb * 1024 * 1024,
            backupCount=logging_config.backup_count
        ))

    formatter = logging.Formatter(logging_config.format)
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
    return handlers


def setup_logging(config, level: Optional[str] = None) -> logging.Logger:
    """
    Configure the package logger from the ``logging`` config section.

    Args:
        config: Configuration object with logging settings
        level: overrides ``logging.level`` when given (e.g. from --log-level)

    Returns:
        The package logger
    """
    name = (level or config.logging.level).upper()
    numeric = getattr(logging, name, logging.INFO)

    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(numeric)
    for old in list(logger.handlers):
        logger.removeHandler(old)
        old.close()
    for handler in _handlers(config.logging, numeric):
        logger.addHandler(handler)
    logger.propagate = False

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Child of the package logger (the package logger itself when ``name`` is empty)."""
    if name:
        return logging.getLogger(f"{ROOT_LOGGER}.{name}")
    return logging.getLogger(ROOT_LOGGER)


def banner(logger: logging.Logger, title: str, lines: Iterable[str] = ()) -> None:
    """Log ``title`` between rules, followed by indented ``lines``."""
    rule = "=" * BANNER_WIDTH
    logger.info(rule)
    logger.info(title)
    for line in lines:
        logger.info(f"  {line}")
    logger.info(rule)
