# ttnc/config.py
"""
Runtime configuration and logging setup.
Loads TTNC_* variables from the environment or a local .env file.
"""
import logging
import os

import psutil
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Log file, default to ttnc.log in the working directory
LOG_PATH = os.getenv("TTNC_LOG_PATH", os.path.join(os.getcwd(), "ttnc.log"))
LOG_LEVEL = os.getenv("TTNC_LOG_LEVEL", "INFO")

# Largest register the dense simulator will allocate
MAX_SIM_QUBITS = int(os.getenv("TTNC_MAX_SIM_QUBITS", "24"))

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def default_workers() -> int:
    """Return the worker count for bench commands.

    ``TTNC_WORKERS`` wins when set; otherwise the number of physical cores.
    """
    load_dotenv()
    value = os.getenv("TTNC_WORKERS")
    if value:
        return max(1, int(value))
    return psutil.cpu_count(logical=False) or 1


def setup_logging(path: str | None = None, level: str | None = None) -> None:
    """Attach a file handler to the ``ttnc`` logger (idempotent)."""
    logger = logging.getLogger("ttnc")
    logger.setLevel(getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO))
    target = os.path.abspath(path or LOG_PATH)
    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler) and handler.baseFilename == target:
            return
    handler = logging.FileHandler(target, encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
