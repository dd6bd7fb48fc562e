# -*- coding: utf-8 -*-
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from infra.persistence.experiment_config import ConfigInvalidError, ExperimentConfig

SCALES = ("desk", "full")


class PresetsStoreError(Exception):
    pass


_FULL_BASE = {"n": 600, "q": 600, "r": 2, "m": 50, "L": 20, "p_edge": 0.5, "trials": 100, "sample_split": False}
_DESK_BASE = {"n": 100, "q": 100, "r": 2, "m": 40, "L": 20, "p_edge": 0.5, "trials": 10, "sample_split": False}


def _scales(full: Dict[str, Any], desk: Dict[str, Any]) -> Dict[str, Dict[str, Any]]:
    return {"full": {**_FULL_BASE, **full}, "desk": {**_DESK_BASE, **desk}}


_ALL = ["dec-altgdmin", "centralized", "dgd-rand", "dgd-zero", "dgd-spect", "one-node"]
_SMALL_NET = ["dec-altgdmin", "centralized", "dgd-spect", "one-node"]

DEFAULT_PRESETS_DOC: Dict[str, Any] = {
    "schema_version": 1,
    "presets": [
        {
            "id": "exp1-m50",
            "name": "Comparacion con AltGDmin centralizado, m=50",
            **_scales(
                {"r": 4, "m": 50, "t": 400, "t_con": 100, "algorithms": ["dec-altgdmin", "centralized"]},
                {"t": 400, "t_con": 100, "algorithms": ["dec-altgdmin", "centralized"]},
            ),
        },
        {
            "id": "exp1-m30",
            "name": "Comparacion con AltGDmin centralizado, m=30",
            **_scales(
                {"r": 4, "m": 30, "t": 400, "t_con": 100, "algorithms": ["dec-altgdmin", "centralized"]},
                {"m": 30, "t": 400, "t_con": 100, "algorithms": ["dec-altgdmin", "centralized"]},
            ),
        },
        {
            "id": "exp2-L20",
            "name": "Comparacion con variantes DGD, L=20",
            **_scales(
                {"t": 400, "t_con": 100, "algorithms": _ALL},
                {"t": 400, "t_con": 100, "algorithms": _ALL},
            ),
        },
        {
            "id": "exp2-L2",
            "name": "Red pequena, L=2",
            **_scales(
                {"L": 2, "t": 600, "t_con": 30, "algorithms": _SMALL_NET},
                {"L": 2, "t": 600, "t_con": 30, "algorithms": _SMALL_NET},
            ),
        },
        {
            "id": "exp2-L20-long",
            "name": "Red grande con T=3000",
            **_scales(
                {"t": 3000, "t_con": 100, "trials": 10, "algorithms": _SMALL_NET},
                {"t": 3000, "t_con": 100, "trials": 3, "algorithms": _SMALL_NET},
            ),
        },
        {
            "id": "exp3-tcon",
            "name": "Efecto de T_con",
            **_scales(
                {"t": 400, "t_con": 30, "algorithms": ["dec-altgdmin", "centralized"]},
                {"t": 400, "t_con": 30, "algorithms": ["dec-altgdmin", "centralized"]},
            ),
            "sweep": {"parameter": "t_con", "values": [5, 10, 25, 100]},
        },
        {
            "id": "exp3-p",
            "name": "Efecto de la probabilidad de arista",
            **_scales(
                {"t": 400, "t_con": 30, "algorithms": ["dec-altgdmin", "centralized"]},
                {"t": 400, "t_con": 30, "algorithms": ["dec-altgdmin", "centralized"]},
            ),
            "sweep": {"parameter": "p_edge", "values": [0.4, 0.5, 0.6, 0.7]},
        },
    ],
}


def _presets_path(app_dir: Path) -> Path:
    return Path(app_dir) / "config" / "presets.json"


def read_json(path: Path) -> Dict[str, Any]:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except Exception as exc:
        raise PresetsStoreError(f"JSON invalido en {path}: {exc}")


def write_json_atomic(path: Path, doc: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(json.dumps(doc, ensure_ascii=False, indent=2), encoding="utf-8")
        os.replace(str(tmp), str(path))
    finally:
        if tmp.exists():
            try:
                tmp.unlink()
            except Exception:
                pass


def ensure_default_presets(app_dir: Path) -> Dict[str, Any]:
    path = _presets_path(Path(app_dir))
    if not path.exists():
        write_json_atomic(path, DEFAULT_PRESETS_DOC)
        return json.loads(json.dumps(DEFAULT_PRESETS_DOC))
    data = read_json(path)
    if data.get("schema_version") != 1:
        raise PresetsStoreError("schema_version esperado 1")
    if "presets" not in data:
        data["presets"] = []
    return data


def list_presets(data: Dict[str, Any]) -> List[Tuple[str, str]]:
    return [(str(p.get("id") or ""), str(p.get("name") or "")) for p in data.get("presets") or []]


def get_preset(data: Dict[str, Any], preset_id: str) -> Dict[str, Any]:
    for p in data.get("presets") or []:
        if str(p.get("id") or "") == str(preset_id):
            return dict(p)
    raise PresetsStoreError(f"Preset no encontrado: {preset_id}")


def preset_config(data: Dict[str, Any], preset_id: str, scale: str = "desk") -> ExperimentConfig:
    if scale not in SCALES:
        raise PresetsStoreError(f"Escala invalida: {scale}")
    preset = get_preset(data, preset_id)
    overrides = preset.get(scale)
    if not isinstance(overrides, dict):
        raise PresetsStoreError(f"El preset {preset_id} no define la escala {scale}")
    cfg = dict(overrides)
    cfg.setdefault("name", f"{preset_id}-{scale}")
    try:
        return ExperimentConfig.from_dict(cfg)
    except ConfigInvalidError as exc:
        raise PresetsStoreError(f"Preset {preset_id} invalido: {exc}")


def preset_sweep(data: Dict[str, Any], preset_id: str) -> Optional[Tuple[str, List[Any]]]:
    sweep = get_preset(data, preset_id).get("sweep")
    if not sweep:
        return None
    return str(sweep.get("parameter") or ""), list(sweep.get("values") or [])
