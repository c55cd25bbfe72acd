import json
import logging
import os
import re
import tempfile
import time
from typing import Any, Dict

import numpy as np
import pandas as pd

import utils.config as config
from utils.logger import setup_logger

logger = setup_logger(name='report_handlers', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

# ----------------------------------------------------------------------------------
# ESCRITURA ATÓMICA DE REPORTES
# ----------------------------------------------------------------------------------

def _a_json(valor: Any) -> Any:
    """Convierte arreglos y escalares de numpy a tipos nativos para json."""
    if isinstance(valor, dict):
        return {str(k): _a_json(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [_a_json(v) for v in valor]
    if isinstance(valor, np.ndarray):
        return _a_json(valor.tolist())
    if isinstance(valor, np.bool_):
        return bool(valor)
    if isinstance(valor, np.integer):
        return int(valor)
    if isinstance(valor, np.floating):
        return float(valor)
    return valor


def _escribir_atomico(ruta: str, escribir) -> str:
    """Escribe en un temporal del mismo directorio y lo renombra sobre `ruta`."""
    directorio = os.path.dirname(os.path.abspath(ruta))
    os.makedirs(directorio, exist_ok=True)
    descriptor, temporal = tempfile.mkstemp(dir=directorio, prefix=".tmp_", suffix=os.path.splitext(ruta)[1])
    try:
        with os.fdopen(descriptor, "w", encoding="utf-8", newline="") as archivo:
            escribir(archivo)
        os.replace(temporal, ruta)
    except Exception:
        if os.path.exists(temporal):
            os.remove(temporal)
        logger.critical(f"\n❌ ERROR CRÍTICO: No se pudo escribir el archivo '{ruta}'.", exc_info=True)
        raise
    return ruta


def escribir_json_atomico(ruta: str, datos: Dict) -> str:
    """
    Escribe un reporte JSON determinista (claves ordenadas, indentación 2).

    Args:
        ruta (str): Archivo destino.
        datos (dict): Contenido; se admiten arreglos y escalares de numpy.

    Returns:
        str: La ruta escrita.
    """
    inicio = time.time()
    contenido = json.dumps(_a_json(datos), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=True)
    _escribir_atomico(ruta, lambda archivo: archivo.write(contenido + "\n"))
    logger.debug(f"\nPERFORMANCE: JSON '{os.path.basename(ruta)}' escrito en {time.time() - inicio:.4f} s")
    return ruta


def escribir_csv_atomico(ruta: str, tabla: pd.DataFrame) -> str:
    """CSV sin índice; pandas emite la representación decimal más corta que reproduce cada float."""
    inicio = time.time()
    _escribir_atomico(ruta, lambda archivo: tabla.to_csv(archivo, index=False, lineterminator="\n"))
    logger.debug(f"\nPERFORMANCE: CSV '{os.path.basename(ruta)}' ({len(tabla)} filas) escrito en {time.time() - inicio:.4f} s")
    return ruta


def leer_json(ruta: str) -> Dict:
    """
    Raises:
        FileNotFoundError: si el archivo no existe.
        json.JSONDecodeError: si el contenido no es JSON válido.
    """
    if not os.path.exists(ruta):
        logger.error(f"\n❌ Archivo JSON no encontrado: '{ruta}'")
        raise FileNotFoundError(f"No existe el archivo '{ruta}'")
    with open(ruta, "r", encoding="utf-8") as archivo:
        return json.load(archivo)


# ----------------------------------------------------------------------------------
# REPORTE DE FALLOS DE PRUEBAS
# ----------------------------------------------------------------------------------

def _handle_failure_reporting(item, report) -> str:
    """
    Registra en reports/fallos un JSON por prueba fallida con su ID, nodo,
    ambiente y el texto del fallo.

    :param item: Objeto de elemento de prueba de Pytest.
    :param report: Objeto de reporte de la fase 'call'.
    """
    test_id_match = re.search(r'\[ID:\s*(.+?)\]', getattr(item.obj, "__doc__", None) or '')
    test_case_id = test_id_match.group(1) if test_id_match else 'N/A'
    nombre_seguro = "".join(c if c.isalnum() or c in ('_', '-') else '_' for c in item.name)
    destino = os.path.join(config.DIRECTORIO_BASE_EVIDENCIAS, "fallos", f"{nombre_seguro}.json")
    try:
        escribir_json_atomico(destino, {
            "id": test_case_id,
            "nodeid": report.nodeid,
            "ambiente": getattr(config, 'AMBIENTE', 'N/A').upper(),
            "duracion": float(getattr(report, 'duration', 0.0)),
            "detalle": str(report.longrepr)[-4000:],
        })
        logger.info(f"\n[FALLO-HANDLER] Fallo de '{item.nodeid}' ({test_case_id}) registrado en '{destino}'")
    except Exception as e:
        logger.error(f"\n❌ No se pudo registrar el fallo de '{item.nodeid}'. Fallo: {e}", exc_info=False)
    return destino
