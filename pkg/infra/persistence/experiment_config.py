# -*- coding: utf-8 -*-
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from domain.entities.models import ETA_MODES, INIT_VARIANTS, WEIGHT_SCHEMES
from domain.services.problem import MEASUREMENT_MODES

ALGORITHMS = ("dec-altgdmin", "centralized", "dgd-rand", "dgd-zero", "dgd-spect", "one-node")
AUTO = "auto"
MAX_SEED = 2 ** 64 - 1


class ExperimentConfigError(Exception):
    pass


class ConfigInvalidError(ExperimentConfigError):
    pass


class ExperimentConfig:
    """Validated experiment configuration (one JSON document, unknown keys rejected)."""

    DEFAULTS: Dict[str, Any] = {
        "name": "experiment",
        "n": 100,
        "q": 100,
        "r": 2,
        "m": 40,
        "L": 20,
        "p_edge": 0.5,
        "weight_scheme": "metropolis",
        "t": 400,
        "t_pm": 50,
        "t_con": 30,
        "eta_mode": "theorem-default",
        "eta": None,
        "init_variant": "two-loop",
        "sample_split": True,
        "exact_consensus": False,
        "trials": 10,
        "master_seed": 20240101,
        "algorithms": ["dec-altgdmin", "centralized"],
        "diagnostics": False,
        "eps_fin": 1e-6,
        "workers": 1,
        "measurement_mode": "auto",
    }

    # keys that do not change any output value
    NON_SEMANTIC_KEYS = ("workers",)

    def __init__(self, data: Dict[str, Any]) -> None:
        self._data = self._normalize(data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        return cls(data)

    @classmethod
    def load(cls, path: Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigInvalidError(f"No existe el archivo de configuracion: {path}")
        except Exception as exc:
            raise ConfigInvalidError(f"JSON invalido en {path}: {exc}")
        if not isinstance(data, dict):
            raise ConfigInvalidError(f"Se esperaba un objeto JSON en {path}")
        return cls(data)

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        try:
            tmp.write_text(json.dumps(self._data, ensure_ascii=False, indent=2), encoding="utf-8")
            os.replace(str(tmp), str(path))
        finally:
            if tmp.exists():
                try:
                    tmp.unlink()
                except Exception:
                    pass

    def to_dict(self) -> Dict[str, Any]:
        return json.loads(json.dumps(self._data))

    def semantic_dict(self) -> Dict[str, Any]:
        d = self.to_dict()
        for key in self.NON_SEMANTIC_KEYS:
            d.pop(key, None)
        return d

    def with_overrides(self, **changes: Any) -> "ExperimentConfig":
        data = self.to_dict()
        data.update(changes)
        return ExperimentConfig(data)

    def __getattr__(self, key: str) -> Any:
        data = self.__dict__.get("_data")
        if data is not None and key in data:
            return data[key]
        raise AttributeError(key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExperimentConfig) and other._data == self._data

    def _normalize(self, data: Dict[str, Any]) -> Dict[str, Any]:
        if not isinstance(data, dict):
            raise ConfigInvalidError("La configuracion debe ser un objeto")
        unknown = sorted(set(data) - set(self.DEFAULTS))
        if unknown:
            raise ConfigInvalidError(f"Claves desconocidas: {', '.join(unknown)}")
        base = json.loads(json.dumps(self.DEFAULTS))
        base.update(data)

        name = str(base.get("name") or "").strip()
        if not name or any(ch in name for ch in "/\\"):
            raise ConfigInvalidError(f"name invalido: {base.get('name')!r}")
        base["name"] = name

        for key in ("n", "q", "r", "m", "L", "trials", "workers"):
            base[key] = _count(key, base[key])
        if base["r"] > min(base["n"], base["q"]):
            raise ConfigInvalidError("Se requiere r <= min(n, q)")
        if base["L"] > base["q"]:
            raise ConfigInvalidError("Se requiere L <= q")
        for key in ("t", "t_pm", "t_con"):
            base[key] = AUTO if base[key] == AUTO else _count(key, base[key])

        base["p_edge"] = _number("p_edge", base["p_edge"])
        if not (0.0 < base["p_edge"] <= 1.0):
            raise ConfigInvalidError("p_edge debe estar en (0, 1]")
        base["eps_fin"] = _number("eps_fin", base["eps_fin"])
        if not (0.0 < base["eps_fin"] < 1.0):
            raise ConfigInvalidError("eps_fin debe estar en (0, 1)")

        _choice("weight_scheme", base["weight_scheme"], WEIGHT_SCHEMES)
        _choice("eta_mode", base["eta_mode"], ETA_MODES)
        _choice("init_variant", base["init_variant"], INIT_VARIANTS)
        _choice("measurement_mode", base["measurement_mode"], MEASUREMENT_MODES)
        if base["eta_mode"] == "fixed":
            base["eta"] = _number("eta", base["eta"])
            if not base["eta"] > 0.0:
                raise ConfigInvalidError("eta debe ser > 0 en modo fijo")
        elif base["eta"] is not None:
            raise ConfigInvalidError("eta solo se admite con eta_mode=fixed")

        for key in ("sample_split", "exact_consensus", "diagnostics"):
            if not isinstance(base[key], bool):
                raise ConfigInvalidError(f"{key} debe ser booleano")

        seed = base["master_seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or not (0 <= seed <= MAX_SEED):
            raise ConfigInvalidError("master_seed debe ser un entero de 64 bits sin signo")

        algos = base["algorithms"]
        if not isinstance(algos, list) or not algos:
            raise ConfigInvalidError("algorithms debe ser una lista no vacia")
        for a in algos:
            _choice("algorithms", a, ALGORITHMS)
        if len(set(algos)) != len(algos):
            raise ConfigInvalidError("algorithms tiene elementos repetidos")
        base["algorithms"] = [str(a) for a in algos]
        return base


def _count(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigInvalidError(f"{key} debe ser un entero >= 1 (recibido {value!r})")
    return int(value)


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigInvalidError(f"{key} debe ser numerico (recibido {value!r})")
    return float(value)


def _choice(key: str, value: Any, allowed: Any) -> None:
    if value not in allowed:
        raise ConfigInvalidError(f"{key} invalido: {value!r} (opciones: {', '.join(allowed)})")


def parse_value(key: str, text: str) -> Any:
    """Parse a sweep value given on the command line for ``key``."""
    text = str(text).strip()
    default = ExperimentConfig.DEFAULTS.get(key)
    if text == AUTO:
        return AUTO
    if isinstance(default, float) or key in ("p_edge", "eps_fin", "eta"):
        try:
            return float(text)
        except ValueError:
            raise ConfigInvalidError(f"Valor invalido para {key}: {text}")
    try:
        return int(text)
    except ValueError:
        raise ConfigInvalidError(f"Valor invalido para {key}: {text}")


def parse_values(key: str, csv_text: Optional[str]) -> List[Any]:
    items = [s for s in str(csv_text or "").split(",") if s.strip()]
    if not items:
        raise ConfigInvalidError("La lista de valores esta vacia")
    return [parse_value(key, s) for s in items]
