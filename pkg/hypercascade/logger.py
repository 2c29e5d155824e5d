# SPDX-License-Identifier: GPL-2.0-only

"""
Named loggers and the handlers hypercascade attaches to them.

hypercascade_startup  configuration and bootstrap; always streamed to stderr
hypercascade          operational logs of every module (hypercascade.<module>)
hypercascade_service  one line per finished bench, verify or ingest run

Benchmark workers are separate processes, so operational records carry the
process name.
"""

import logging
from logging import handlers

datefmt = "%y-%m-%dT%H:%M:%S"
default_fmttr = logging.Formatter(
    "%(asctime)s - %(processName)s - %(name)s - %(levelname)s: %(message)s",
    datefmt
)
service_fmttr = logging.Formatter("[%(asctime)s] %(message)s", datefmt)
startup_fmttr = logging.Formatter("%(levelname)s: %(message)s")

# Third-party loggers that only add noise to benchmark output
noisy = ("matplotlib", "PIL", "sqlalchemy.engine")


def stream_level(quiet=False, verbose=False):
    """
    Returns the stderr level picked by the -q and -v flags.
    """
    if quiet:
        return logging.CRITICAL
    if verbose:
        return logging.DEBUG
    return logging.INFO


def add_rotating_file(to_logger, filename, suffix, days, fmttr=default_fmttr,
                      level=logging.INFO):
    """
    Attaches a file handler that starts a new file every `days` days, with
    `suffix` (a strftime format) appended to rotated files. Returns the
    handler.
    """
    file_handler = handlers.TimedRotatingFileHandler(filename, when="D",
                                                     interval=days)
    file_handler.suffix = suffix
    file_handler.setFormatter(fmttr)
    file_handler.setLevel(level)
    to_logger.addHandler(file_handler)
    return file_handler


def add_stream(to_logger, fmttr=default_fmttr, level=logging.DEBUG):
    """
    Attaches a stderr handler and returns it.
    """
    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(fmttr)
    stream_handler.setLevel(level)
    to_logger.addHandler(stream_handler)
    return stream_handler


def silence(names=noisy):
    for name in names:
        logging.getLogger(name).setLevel(logging.CRITICAL)


silence()

service_logger = logging.getLogger("hypercascade_service")
service_logger.setLevel(logging.INFO)

debug_logger = logging.getLogger("hypercascade")
debug_logger.setLevel(logging.DEBUG)

startup_logger = logging.getLogger("hypercascade_startup")
startup_logger.setLevel(logging.DEBUG)
add_stream(startup_logger, startup_fmttr, level=logging.INFO)
