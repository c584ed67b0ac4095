"""=== Simulator configuration ======================================================================================
Module level settings. Every value can be overridden from the environment or from a .env file found by dotenv.
==================================================================================================================="""

import os
from dotenv import load_dotenv

load_dotenv()


def _env_bool(key: str, default: bool) -> bool:
    raw = os.getenv(key)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


# PATHS                                                                                     paths   - START -
PATH_ROOT: str              = os.getenv("IMPULSE_PATH_ROOT", os.getcwd())
# PATHS                                                                                     paths   - ENDED -

# LOGGING                                                                                   logging - START -
LOG_PATH: str               = os.getenv("IMPULSE_LOG_PATH", "{}/logs")
LOG_FILENAME: str           = os.getenv("IMPULSE_LOG_FILENAME", "{}/impulse{}.log")
LOG_TIMED: bool             = _env_bool("IMPULSE_LOG_TIMED", False)
LOG_TO_FILE: bool           = _env_bool("IMPULSE_LOG_TO_FILE", False)
LOG_FORMAT: str             = os.getenv("IMPULSE_LOG_FORMAT", "%(asctime)s %(levelname)-8s %(name)-24s %(message)s")
LOG_TIMEFORMAT: str         = os.getenv("IMPULSE_LOG_TIMEFORMAT", "%Y-%m-%d %H:%M:%S")
LOG_LEVEL_FILE: str         = os.getenv("IMPULSE_LOG_LEVEL_FILE", "DEBUG")
LOG_LEVEL_CONS: str         = os.getenv("IMPULSE_LOG_LEVEL_CONS", "WARNING")
LOG_STREAM: str             = os.getenv("IMPULSE_LOG_STREAM", "ext://sys.stderr")
# LOGGING                                                                                   logging - ENDED -

# SIMULATION                                                                                sim     - START -
STRICT_MODE: bool           = _env_bool("IMPULSE_STRICT", False)
SATURATE: bool              = _env_bool("IMPULSE_SATURATE", False)
CYCLES_PER_INSTRUCTION: int = int(os.getenv("IMPULSE_CYCLES_PER_INSTRUCTION", "1"))
ENERGY_TABLE_PATH: str      = os.getenv("IMPULSE_ENERGY_TABLE", "")
DEFAULT_TIMESTEPS: int      = int(os.getenv("IMPULSE_TIMESTEPS", "10"))
# SIMULATION                                                                                sim     - ENDED -
