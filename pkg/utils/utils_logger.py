"""
Logger Setup Script
File: utils/utils_logger.py

This script provides logging for the toolkit.
Every module imports `logger` from here so that all
numerical runs leave a trace in one log file.

Features:
- Logs information, warnings, and errors to a designated log file.
- Ensures the log directory exists.
- Folder and level can be overridden with ENTROPY_LOG_DIR and ENTROPY_LOG_LEVEL.
"""

#####################################
# Imports
#####################################

# Imports from Python Standard Library
import os
import pathlib

# Imports from external packages
from loguru import logger

# Get this file name without the extension
CURRENT_SCRIPT = pathlib.Path(__file__).stem

# Set directory where logs will be stored
LOG_FOLDER: pathlib.Path = pathlib.Path(os.getenv("ENTROPY_LOG_DIR", "logs"))

# Set the name of the log file
LOG_FILE: pathlib.Path = LOG_FOLDER.joinpath("project_log.log")

# Set the minimum level written to the log file
LOG_LEVEL: str = os.getenv("ENTROPY_LOG_LEVEL", "INFO")

# Ensure the log folder exists or create it
try:
    LOG_FOLDER.mkdir(exist_ok=True)
    logger.debug(f"Log folder ready at: {LOG_FOLDER}")
except Exception as e:
    logger.error(f"Error creating log folder: {e}")

# Configure Loguru to write to the log file
try:
    logger.add(LOG_FILE, level=LOG_LEVEL)
    logger.debug(f"Logging to file: {LOG_FILE}")
except Exception as e:
    logger.error(f"Error configuring logger to write to file: {e}")


def get_log_file_path() -> pathlib.Path:
    """Return the path to the log file."""
    return LOG_FILE


def quiet_console() -> None:
    """
    Drop the default stderr sink so CLI summaries stay on one screen.

    The file sink keeps receiving every record.
    """
    try:
        logger.remove(0)
    except ValueError:
        # default sink already removed
        pass
