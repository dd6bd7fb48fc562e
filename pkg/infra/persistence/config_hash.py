# -*- coding: utf-8 -*-
from __future__ import annotations

import hashlib
import json
from typing import Any, Dict

from infra.persistence.experiment_config import ExperimentConfig


def canonical_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the settings that determine the output values."""
    data = canonical_json(config.semantic_dict())
    return hashlib.sha256(data.encode("utf-8")).hexdigest()
