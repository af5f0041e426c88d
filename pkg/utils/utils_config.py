"""
Config Utility
File: utils/utils_config.py

This script provides the configuration functions for the toolkit.

It centralizes configuration management
by loading environment variables from .env in the root project folder
and constructing file paths using pathlib.

If you rename any variables in .env, remember to:
- recopy .env to .env.example
- update the corresponding function in this module.
"""

#####################################
# Imports
#####################################

# import from Python Standard Library
import os
import pathlib

# import from external packages
from dotenv import dotenv_values, load_dotenv

# import from local modules
from .utils_errors import ConfigError
from .utils_logger import logger

#####################################
# Load Environment Variables
#####################################

load_dotenv()

#####################################
# Getter Functions for .env Variables
#####################################


def get_spectral_tolerance() -> float:
    """Fetch ENTROPY_SPECTRAL_TOL from environment or use default."""
    tol = float(os.getenv("ENTROPY_SPECTRAL_TOL", 1e-12))
    logger.info(f"ENTROPY_SPECTRAL_TOL: {tol}")
    return tol


def get_max_iterations() -> int:
    """Fetch ENTROPY_MAX_ITERATIONS from environment or use default."""
    cap = int(os.getenv("ENTROPY_MAX_ITERATIONS", 1_000_000))
    logger.info(f"ENTROPY_MAX_ITERATIONS: {cap}")
    return cap


def get_oracle_max_order() -> int:
    """Fetch ENTROPY_ORACLE_MAX_ORDER from environment or use default."""
    order = int(os.getenv("ENTROPY_ORACLE_MAX_ORDER", 8))
    logger.info(f"ENTROPY_ORACLE_MAX_ORDER: {order}")
    return order


def get_seed() -> int:
    """Fetch ENTROPY_SEED from environment or use default."""
    seed = int(os.getenv("ENTROPY_SEED", 20240101))
    logger.info(f"ENTROPY_SEED: {seed}")
    return seed


def get_jobs() -> int:
    """Fetch ENTROPY_JOBS from environment or use default."""
    jobs = int(os.getenv("ENTROPY_JOBS", 1))
    logger.info(f"ENTROPY_JOBS: {jobs}")
    return jobs


def get_grid_resolution() -> int:
    """Fetch ENTROPY_GRID_RESOLUTION from environment or use default."""
    resolution = int(os.getenv("ENTROPY_GRID_RESOLUTION", 400))
    logger.info(f"ENTROPY_GRID_RESOLUTION: {resolution}")
    return resolution


def get_orbit_length() -> int:
    """Fetch ENTROPY_ORBIT_LENGTH from environment or use default."""
    n = int(os.getenv("ENTROPY_ORBIT_LENGTH", 12))
    logger.info(f"ENTROPY_ORBIT_LENGTH: {n}")
    return n


def get_epsilon() -> float:
    """Fetch ENTROPY_EPSILON from environment or use default."""
    epsilon = float(os.getenv("ENTROPY_EPSILON", 1e-3))
    logger.info(f"ENTROPY_EPSILON: {epsilon}")
    return epsilon


def get_tail_window() -> float:
    """Fetch ENTROPY_TAIL_WINDOW from environment or use default."""
    window = float(os.getenv("ENTROPY_TAIL_WINDOW", 0.5))
    logger.info(f"ENTROPY_TAIL_WINDOW: {window}")
    return window


def get_base_data_path() -> pathlib.Path:
    """Fetch ENTROPY_OUTPUT_DIR from environment or use default."""
    project_root = pathlib.Path(__file__).parent.parent
    data_dir = project_root / os.getenv("ENTROPY_OUTPUT_DIR", "data")
    logger.info(f"ENTROPY_OUTPUT_DIR: {data_dir}")
    return data_dir


#####################################
# Scenario Config Files
#####################################


def read_scenario_config(path: pathlib.Path, allowed: set[str]) -> dict[str, str]:
    """
    Read an optional KEY=VALUE scenario file.

    Keys are matched case-insensitively with dashes and underscores
    treated alike, so `N1`, `n1` and `tail-window` all work.

    Raises:
        ConfigError: if the file is missing or holds a key outside `allowed`.
    """
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")

    raw = dotenv_values(path)
    names = {name.lower().replace("-", "_"): name for name in allowed}
    values: dict[str, str] = {}
    unknown = []
    for key, value in raw.items():
        normalized = key.strip().lower().replace("-", "_")
        if normalized not in names:
            unknown.append(key)
            continue
        if value is None:
            raise ConfigError(f"config key {key!r} has no value in {path}")
        values[names[normalized]] = value

    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(sorted(unknown))}")

    logger.info(f"Loaded {len(values)} config values from {path}")
    return values


def canonical_config_text(config: dict[str, object]) -> str:
    """Sorted `key=value` lines; the input to the report config hash."""
    return "".join(f"{key}={config[key]}\n" for key in sorted(config))


#####################################
# Conditional Execution
#####################################

if __name__ == "__main__":
    # Test the configuration functions
    logger.info("Testing configuration.")
    try:
        get_spectral_tolerance()
        get_max_iterations()
        get_oracle_max_order()
        get_seed()
        get_jobs()
        get_grid_resolution()
        get_orbit_length()
        get_epsilon()
        get_tail_window()
        get_base_data_path()
        logger.info("SUCCESS: Configuration function tests complete.")

    except Exception as e:
        logger.error(f"ERROR: Configuration function test failed: {e}")
