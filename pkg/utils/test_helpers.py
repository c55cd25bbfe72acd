import json
import logging

import allure
import numpy as np

from utils import config
from utils.report_handlers import _a_json
from utils.logger import setup_logger

logger = setup_logger(name='test_helpers', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)


def adjuntar_json(nombre: str, datos) -> None:
    """Adjunta un diccionario al reporte de Allure."""
    allure.attach(json.dumps(_a_json(datos), indent=2, sort_keys=True, ensure_ascii=False),
                  name=nombre, attachment_type=allure.attachment_type.JSON)


def afirmar_cercano(obtenido, esperado, tolerancia: float, descripcion: str, relativa: bool = False) -> float:
    """
    Compara en norma máxima y falla con un mensaje en español.

    Args:
        relativa: divide por max(‖esperado‖_∞, 1).

    Returns:
        float: el error medido.
    """
    obtenido = np.asarray(obtenido, dtype=float)
    esperado = np.asarray(esperado, dtype=float)
    error = float(np.max(np.abs(obtenido - esperado))) if obtenido.size else 0.0
    if relativa:
        error /= max(float(np.max(np.abs(esperado))) if esperado.size else 0.0, 1.0)
    logger.debug(f"\n{descripcion}: error {error:.3e} (tolerancia {tolerancia:.1e})")
    assert error < tolerancia, f"\n❌ {descripcion}: error {error:.3e} supera la tolerancia {tolerancia:.1e}"
    return error


def afirmar_menor(valor: float, tolerancia: float, descripcion: str) -> None:
    logger.debug(f"\n{descripcion}: {valor:.3e} (tolerancia {tolerancia:.1e})")
    assert valor < tolerancia, f"\n❌ {descripcion}: {valor:.3e} no es menor que {tolerancia:.1e}"
