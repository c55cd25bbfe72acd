"""
Línea de comandos del banco de pruebas.

    python -m bench run <config.json> [...] [--delta D] [--mode M] [--t-end T] [--step H]
                                            [--seed S] [--out-dir DIR] [--renormalize] [--workers N]
    python -m bench list
    python -m bench describe <manifold_id>
    python -m bench verify <manifold_id> [--seed S] [--out-dir DIR] [--configuraciones N]

Códigos de salida: 0 todos los chequeos pasan, 1 algún chequeo supera su
tolerancia, 2 configuración inválida o variedad desconocida, 3 error numérico
o de ejecución. El resultado se imprime en stdout como JSON; los logs van a stderr.
"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional

from bench.experiment import MODOS
from bench.runner import CONFIGURACIONES_ORACULO_VERIFY, ejecutar_lote, verify
from manifolds.registry import describe_manifold, list_manifolds
from utils import config
from utils.errores import ConfigInvalid, GeometriaError, UnknownManifold
from utils.logger import setup_logger
from utils.report_handlers import _a_json

logger = setup_logger(name='cli', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

EXIT_OK = 0
EXIT_TOLERANCIA = 1
EXIT_CONFIG = 2
EXIT_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse termina con código 2 en errores de uso; se conserva, pero registrando el motivo."""

    def error(self, message):
        logger.error(f"\n❌ Argumentos inválidos: {message}")
        super().error(message)


def construir_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bench", description="Banco de geodésicas de la métrica de Berger-Sasaki.")
    sub = parser.add_subparsers(dest="comando", required=True)

    run = sub.add_parser("run", help="Ejecuta uno o más experimentos descritos en JSON.")
    run.add_argument("configs", nargs="+", help="Archivos de configuración de experimento.")
    run.add_argument("--delta", type=float, default=None)
    run.add_argument("--mode", choices=MODOS, default=None)
    run.add_argument("--t-end", dest="t_end", type=float, default=None)
    run.add_argument("--step", type=float, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out-dir", dest="out_dir", default=None)
    run.add_argument("--renormalize", action="store_true", default=None)
    run.add_argument("--workers", type=int, default=1)

    sub.add_parser("list", help="Lista las variedades registradas.")

    describe = sub.add_parser("describe", help="Describe una variedad registrada.")
    describe.add_argument("manifold_id")

    verificar = sub.add_parser("verify", help="Suite de invariantes de una variedad.")
    verificar.add_argument("manifold_id")
    verificar.add_argument("--seed", type=int, default=0)
    verificar.add_argument("--out-dir", dest="out_dir", default=None)
    verificar.add_argument("--configuraciones", type=int, default=CONFIGURACIONES_ORACULO_VERIFY,
                           help="Configuraciones aleatorias del oráculo por cada δ.")
    return parser


def _imprimir(datos) -> None:
    print(json.dumps(_a_json(datos), indent=2, sort_keys=True, ensure_ascii=False))


def _overrides(args: argparse.Namespace) -> Dict:
    return {
        "delta": args.delta,
        "mode": args.mode,
        "t_end": args.t_end,
        "step": args.step,
        "seed": args.seed,
        "out_dir": args.out_dir,
        "renormalize": args.renormalize,
    }


def _comando_run(args: argparse.Namespace) -> int:
    resultados = ejecutar_lote(args.configs, _overrides(args), workers=args.workers)
    salida = [{"config": ruta, **resultado} for ruta, resultado in zip(args.configs, resultados)]
    _imprimir(salida)
    return EXIT_OK if all(r["pasa"] for r in resultados) else EXIT_TOLERANCIA


def _comando_verify(args: argparse.Namespace) -> int:
    reporte = verify(args.manifold_id, out_dir=args.out_dir, seed=args.seed,
                     n_configuraciones=args.configuraciones)
    _imprimir({k: reporte[k] for k in ("manifold", "chequeos", "configuraciones_oraculo", "pasa", "archivo")})
    return EXIT_OK if reporte["pasa"] else EXIT_TOLERANCIA


def main(argv: Optional[List[str]] = None) -> int:
    """
    Punto de entrada de la CLI.

    Returns:
        int: código de salida (0, 1, 2 o 3).
    """
    parser = construir_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK

    try:
        if args.comando == "run":
            return _comando_run(args)
        if args.comando == "verify":
            return _comando_verify(args)
        if args.comando == "list":
            _imprimir(list_manifolds())
            return EXIT_OK
        _imprimir(describe_manifold(args.manifold_id))
        return EXIT_OK
    except ConfigInvalid as e:
        logger.error(f"\n❌ Configuración inválida: {e}")
        _imprimir({"error": "ConfigInvalid", "detalle": list(e.errores)})
        return EXIT_CONFIG
    except UnknownManifold as e:
        logger.error(f"\n❌ Variedad desconocida: {e}")
        _imprimir({"error": "UnknownManifold", "detalle": str(e)})
        return EXIT_CONFIG
    except GeometriaError as e:
        logger.critical(f"\n❌ ERROR CRÍTICO durante '{args.comando}': {e}", exc_info=True)
        _imprimir({"error": type(e).__name__, "detalle": str(e)})
        return EXIT_ERROR
    except Exception as e:
        logger.critical(f"\n❌ ERROR INESPERADO durante '{args.comando}': {e}", exc_info=True)
        _imprimir({"error": type(e).__name__, "detalle": str(e)})
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
