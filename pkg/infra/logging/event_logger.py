# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional

_LOGGER_NAME = "dec_altgdmin.events"
_LOG_FILE_NAME = "dec_altgdmin_events.log"
_FORMAT = "[%(asctime)s.%(msecs)03d] [%(levelname)s] [%(event)s] %(message)s (%(filename)s:%(lineno)d %(funcName)s)"


class _EventDefault(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        if not hasattr(record, "event"):
            record.event = "-"
        return True


def _get_logger() -> logging.Logger:
    logger = logging.getLogger(_LOGGER_NAME)
    if not any(isinstance(f, _EventDefault) for f in logger.filters):
        logger.addFilter(_EventDefault())
    return logger


def configure_logging(log_dir: Optional[Path] = None, verbose: bool = False) -> logging.Logger:
    """Attach the stderr handler and, when ``log_dir`` is given, the file handler.

    Calling it again replaces the handlers it installed before.
    """
    logger = _get_logger()
    for h in list(logger.handlers):
        if getattr(h, "_dec_altgdmin", False):
            logger.removeHandler(h)
            h.close()
    logger.setLevel(logging.DEBUG)
    formatter = logging.Formatter(_FORMAT, datefmt="%H:%M:%S")

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(logging.DEBUG if verbose else logging.INFO)
    console.setFormatter(formatter)
    console._dec_altgdmin = True  # type: ignore[attr-defined]
    logger.addHandler(console)

    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(log_dir / _LOG_FILE_NAME, encoding="utf-8", mode="a")
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(formatter)
        handler._dec_altgdmin = True  # type: ignore[attr-defined]
        logger.addHandler(handler)

    logger.propagate = False
    return logger


def log_event(event: str, message: str = "", level: int = logging.DEBUG) -> None:
    try:
        logger = _get_logger()
        if logger.isEnabledFor(level):
            logger.log(level, message, extra={"event": event}, stacklevel=2)
    except Exception:
        try:
            logging.getLogger(__name__).exception("log_event failed")
        except Exception:
            pass
