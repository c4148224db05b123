import logging
import os

from rich.logging import RichHandler

LOGGER_NAME = "beamscan"


def get_logger(logger_name: str) -> logging.Logger:
    # https://rich.readthedocs.io/en/latest/reference/logging.html#rich.logging.RichHandler
    rich_handler = RichHandler(
        show_time=False,
        rich_tracebacks=False,
        show_path=os.getenv("BEAMSCAN_DEBUG") is not None,
        tracebacks_show_locals=False,
    )
    rich_handler.setFormatter(logging.Formatter(fmt="%(message)s", datefmt="[%X]"))

    _logger = logging.getLogger(logger_name)
    if not _logger.handlers:
        _logger.addHandler(rich_handler)
    _logger.setLevel(logging.INFO)
    _logger.propagate = False
    return _logger


logger: logging.Logger = get_logger(LOGGER_NAME)


def set_log_level_to_debug():
    logger.setLevel(logging.DEBUG)


def log_debug(msg, *args, **kwargs):
    logger.debug(msg, *args, **kwargs)


def log_info(msg, *args, **kwargs):
    logger.info(msg, *args, **kwargs)


def log_warning(msg, *args, **kwargs):
    logger.warning(msg, *args, **kwargs)


def log_error(msg, *args, **kwargs):
    logger.error(msg, *args, **kwargs)


if os.getenv("BEAMSCAN_DEBUG", "").lower() in ("1", "true", "yes"):
    set_log_level_to_debug()
