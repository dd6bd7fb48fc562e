# -*- coding: utf-8 -*-
from __future__ import annotations

import logging

from infra.logging.event_logger import configure_logging, log_event


def test_events_reach_the_log_file(tmp_path):
    logger = configure_logging(tmp_path)
    log_event("network_built", "L=4 intento=0", level=logging.INFO)
    log_event("gd_progress", "detalle")
    for h in logger.handlers:
        h.flush()
    text = (tmp_path / "dec_altgdmin_events.log").read_text(encoding="utf-8")
    assert "[network_built] L=4 intento=0" in text
    assert "[gd_progress] detalle" in text
    assert "test_event_logger.py" in text


def test_configure_is_idempotent(tmp_path):
    configure_logging(tmp_path)
    logger = configure_logging(tmp_path)
    ours = [h for h in logger.handlers if getattr(h, "_dec_altgdmin", False)]
    assert len(ours) == 2
    configure_logging(None)
