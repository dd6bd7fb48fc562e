# -*- coding: utf-8 -*-
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from data.repositories.presets_store import (
    SCALES,
    PresetsStoreError,
    ensure_default_presets,
    list_presets,
    preset_config,
    preset_sweep,
)
from domain.services.experiment import SWEEP_PARAMETERS, AllTrialsFailedError, ExperimentResult, run_experiment, sweep
from domain.services.network import NetworkError
from infra.logging.event_logger import configure_logging, log_event
from infra.persistence.experiment_config import ConfigInvalidError, ExperimentConfig, parse_values
from ui.charts.trace_chart import ChartError, ChartInputError, MissingFieldError, emit_chart

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

X_FIELDS = ("iteration", "elapsed_seconds")
Y_FIELDS = ("error_x", "se2_node1", "max_disagreement_frob", "cons_err_max")


def _app_dir() -> Path:
    return Path(__file__).resolve().parent.parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dec_altgdmin",
        description="Simulador de Dec-AltGDmin y experimentos de comparacion.",
    )
    parser.add_argument("--verbose", action="store_true", help="Registro DEBUG en consola")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Ejecuta un experimento")
    run.add_argument("config", nargs="?", type=Path, help="Configuracion JSON")
    run.add_argument("--preset", help="Id de preset (ver 'presets')")
    run.add_argument("--scale", choices=SCALES, default="desk")
    run.add_argument("--out-dir", type=Path, default=Path("results"))
    run.add_argument("--workers", type=int, default=None)

    sw = sub.add_parser("sweep", help="Barrido de un parametro")
    sw.add_argument("config", type=Path)
    sw.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    sw.add_argument("--values", required=True, help="Lista separada por comas")
    sw.add_argument("--out-dir", type=Path, default=Path("results"))
    sw.add_argument("--workers", type=int, default=None)

    ch = sub.add_parser("chart", help="Grafico SVG de un CSV de trazas")
    ch.add_argument("csv", type=Path)
    ch.add_argument("--x", default="iteration", choices=X_FIELDS)
    ch.add_argument("--y", default="error_x", choices=Y_FIELDS)
    ch.add_argument("--group", default="algorithm")
    ch.add_argument("--out", type=Path, required=True)
    ch.add_argument("--title", default=None)

    sub.add_parser("presets", help="Lista los presets incluidos")
    return parser


def _with_workers(cfg: ExperimentConfig, workers: Optional[int]) -> ExperimentConfig:
    return cfg if workers is None else cfg.with_overrides(workers=workers)


def _report(result: ExperimentResult) -> None:
    for algo in result.config.algorithms:
        ok, err, se2 = result.final_means(algo)
        print(f"{result.config.name}\t{algo}\tok={ok}/{result.config.trials}\terror_x={err:.3e}\tse2={se2:.3e}")
    if result.trace_path is not None:
        print(f"trazas: {result.trace_path}")


def _cmd_run(args: argparse.Namespace) -> int:
    sweep_spec = None
    if args.preset:
        data = ensure_default_presets(_app_dir())
        cfg = preset_config(data, args.preset, args.scale)
        sweep_spec = preset_sweep(data, args.preset)
    elif args.config is not None:
        cfg = ExperimentConfig.load(args.config)
    else:
        raise ConfigInvalidError("Indique un archivo de configuracion o --preset")
    cfg = _with_workers(cfg, args.workers)
    if sweep_spec is not None:
        for res in sweep(cfg, sweep_spec[0], sweep_spec[1], args.out_dir):
            _report(res)
        return EXIT_OK
    _report(run_experiment(cfg, args.out_dir))
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _with_workers(ExperimentConfig.load(args.config), args.workers)
    for res in sweep(cfg, args.param, parse_values(args.param, args.values), args.out_dir):
        _report(res)
    return EXIT_OK


def _cmd_chart(args: argparse.Namespace) -> int:
    path = emit_chart(args.csv, args.x, args.y, args.group, args.out, title=args.title)
    print(f"grafico: {path}")
    return EXIT_OK


def _cmd_presets(args: argparse.Namespace) -> int:
    data = ensure_default_presets(_app_dir())
    for preset_id, name in list_presets(data):
        sweep_spec = preset_sweep(data, preset_id)
        suffix = f"  [barrido {sweep_spec[0]}={sweep_spec[1]}]" if sweep_spec else ""
        print(f"{preset_id}\t{name}{suffix}")
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "chart": _cmd_chart, "presets": _cmd_presets}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    log_dir = getattr(args, "out_dir", None)
    configure_logging(log_dir, verbose=args.verbose)

    try:
        return COMMANDS[args.command](args)
    except (ConfigInvalidError, PresetsStoreError, MissingFieldError, ChartInputError, NetworkError) as exc:
        log_event("config_error", str(exc), level=logging.ERROR)
        print(f"Error de configuracion: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AllTrialsFailedError, ChartError) as exc:
        log_event("run_failed", str(exc), level=logging.ERROR)
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
