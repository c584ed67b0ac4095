"""=== Logger setup ==="""

import logging
import os
import time
from logging.config import dictConfig


def log_stamp(at: float = None) -> str:
    """UTC 'YYYYMMDD-hhmmss' suffix of timed log files."""
    return time.strftime("%Y%m%d-%H%M%S", time.gmtime(time.time() if at is None else at))


def build_log_conf(conf) -> dict:
    """=== Function name: build_log_conf ===============================================================================
    Translates the simulator settings (see imp_config.conf) into a dictConfig schema.
    The file handler is only added if conf.LOG_TO_FILE is set: a simulation run started from the CLI should not
    leave log files behind unless asked to.
    ==================================================================================================================="""
    handlers = {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "default",
            "level": getattr(logging, conf.LOG_LEVEL_CONS),
            "stream": conf.LOG_STREAM,  # stderr by default: stdout carries CLI summaries
        },
    }
    if conf.LOG_TO_FILE:
        log_ts = "_{}".format(log_stamp()) if conf.LOG_TIMED else ""
        log_dir = conf.LOG_PATH.format(conf.PATH_ROOT)
        if not os.path.exists(log_dir):
            os.makedirs(log_dir)
        handlers["file"] = {
            "class": "logging.FileHandler",
            "filename": conf.LOG_FILENAME.format(log_dir, log_ts),
            "formatter": "default",
            "level": getattr(logging, conf.LOG_LEVEL_FILE),
            "mode": "w",
        }

    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "default": {
                "format": conf.LOG_FORMAT,
                "datefmt": conf.LOG_TIMEFORMAT,
            },
        },
        "handlers": handlers,
        "root": {
            "level": "DEBUG",
            "handlers": list(handlers),
        },
        "loggers": {
            # SQL echo is far too chatty next to the simulator's own messages
            "sqlalchemy": {
                "level": "WARNING",
                "handlers": list(handlers),
                "propagate": False
            },
        }
    }


def setup_logger(conf, logger_name: str = "impulse"):
    """=== Function name: setup_logger ==================================================================================
    Applies the simulator logging settings of conf. Called once per CLI invocation.
    :return: (named logger, the dictConfig schema applied)
    ==================================================================================================================="""
    log_conf = build_log_conf(conf)
    dictConfig(log_conf)
    return logging.getLogger(logger_name), log_conf
