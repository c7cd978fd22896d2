import logging
import sys
from typing import List, Optional

from config import settings


LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Libraries that are chatty at INFO
QUIET_LOGGERS = ("sqlalchemy.engine", "urllib3", "requests", "transitions")


def setup_logging(log_level: Optional[str] = None) -> None:
    """
    Configure ransomtrace logging.

    Records go to stderr (stdout carries the stage summaries) and, when
    `settings.log_file` is set, to that file as well. Calling it again
    replaces the previous configuration.

    Args:
        log_level: Level name overriding `settings.log_level`.
    """
    level_name = (log_level or settings.log_level).upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        level = logging.INFO

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file, encoding="utf-8"))

    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)

    quiet = logging.INFO if level <= logging.DEBUG else logging.WARNING
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(quiet)
