"""
Centralized logging configuration for the workbench.

Usage:
    from app.logger import get_logger
    logger = get_logger(__name__)
    logger.info("Suite done | name=%s checked=%d", name, checked)

Console output goes to stderr: stdout carries reports only.
"""

import logging
import os
import sys
from logging.handlers import RotatingFileHandler

from dotenv import find_dotenv, load_dotenv

_LOG_FORMAT = "%(asctime)s | %(levelname)-7s | %(name)s | %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_configured = False


def _setup_root_logger() -> None:
    """Configure the 'app' logger once with console + rotating file handlers."""
    global _configured
    if _configured:
        return
    _configured = True

    # LOG_* may come from .env; real environment variables win
    load_dotenv(find_dotenv(usecwd=True))
    level_name = os.getenv("LOG_LEVEL", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)

    root = logging.getLogger("app")
    root.setLevel(level)

    # Prevent duplicate handlers when the package is re-imported
    if root.handlers:
        return

    formatter = logging.Formatter(_LOG_FORMAT, datefmt=_DATE_FORMAT)

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(formatter)
    root.addHandler(console)

    if os.getenv("LOG_TO_FILE", "1") == "0":
        return

    log_dir = os.getenv("LOG_DIR") or os.path.join(os.path.dirname(os.path.dirname(__file__)), "logs")
    try:
        os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(
            os.path.join(log_dir, "workbench.log"),
            maxBytes=5 * 1024 * 1024,  # 5 MB
            backupCount=3,
            encoding="utf-8",
        )
    except OSError as exc:
        root.warning("File logging disabled | log_dir=%s error=%s", log_dir, exc)
        return
    file_handler.setLevel(level)
    file_handler.setFormatter(formatter)
    root.addHandler(file_handler)


def get_logger(name: str) -> logging.Logger:
    """Return a child logger under the 'app' namespace."""
    _setup_root_logger()
    return logging.getLogger(name)
