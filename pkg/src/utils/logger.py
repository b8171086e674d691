"""
Logging utilities
"""

import logging
import os
from datetime import datetime
from typing import Optional


def setup_logger(
    name: str = None, level: str = "INFO", log_dir: Optional[str] = None
) -> logging.Logger:
    """
    Setup application logger

    Args:
        name: Logger name (optional)
        level: Logging level
        log_dir: Directory for the daily log file (no file logging if None)

    Returns:
        Configured logger instance
    """
    if name is None:
        name = "arclust"

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper()))

    # Don't add handlers if they already exist
    if logger.handlers:
        return logger

    # Create formatters
    detailed_formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    simple_formatter = logging.Formatter("%(levelname)s: %(message)s")

    # Console handler
    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, level.upper()))
    console_handler.setFormatter(simple_formatter)
    logger.addHandler(console_handler)

    # File handler (only when a log directory is configured)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        log_filename = f"{name}_{datetime.now().strftime('%Y%m%d')}.log"
        log_filepath = os.path.join(log_dir, log_filename)

        file_handler = logging.FileHandler(log_filepath)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(detailed_formatter)
        logger.addHandler(file_handler)

    return logger
