# Fixtures compartidas por las pruebas unitarias y de extremo a extremo.
import logging
import os

import numpy as np
import pytest

from geometria.berger_sasaki import BergerSasakiConfig
from manifolds import cp1, flat, paper_r2
from manifolds.registry import obtener_registro
from utils import config
from utils.config import settings_por_defecto
from utils.logger import setup_logger
from utils.report_handlers import _handle_failure_reporting

logger = setup_logger(name='conftest', console_level=logging.INFO, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)


@pytest.fixture(scope="session")
def ajustes():
    return settings_por_defecto()


@pytest.fixture(scope="session")
def carta_paper():
    return paper_r2.construir_carta()


@pytest.fixture(scope="session")
def carta_cp1():
    return cp1.construir_carta()


@pytest.fixture(scope="session")
def carta_plana():
    return flat.construir_carta(1)


@pytest.fixture(scope="session")
def configuracion_metrica(ajustes):
    """
    Fábrica de BergerSasakiConfig: configuracion_metrica(carta, delta).
    """
    def _construir(carta, delta: float) -> BergerSasakiConfig:
        return BergerSasakiConfig.desde_carta(carta, delta, ajustes)
    return _construir


@pytest.fixture(scope="session")
def entrada_cp1():
    return obtener_registro(cp1.ID)


@pytest.fixture(scope="session")
def entrada_paper():
    return obtener_registro(paper_r2.ID)


@pytest.fixture(scope="function")
def rng():
    """Generador con semilla fija: cada prueba ve la misma secuencia."""
    return np.random.default_rng(0)


@pytest.fixture(scope="function")
def directorio_salida(tmp_path):
    salida = tmp_path / "experimentos"
    salida.mkdir()
    logger.debug(f"\n[FIXTURE: directorio_salida] Reportes de la prueba en: {salida}")
    return str(salida)


@pytest.fixture(scope="session")
def ruta_datos():
    """Ruta de un archivo de configuración versionado en tests/files/files_data_source."""
    def _ruta(nombre: str) -> str:
        return os.path.join(config.SOURCE_FILES_DIR_DATA_SOURCE, nombre)
    return _ruta


# --- HOOKS DE PYTEST PARA REPORTES POST-TEST ---

@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """
    Genera el reporte y, si la fase 'call' falla, registra el fallo en reports/fallos.
    """
    outcome = yield
    report = outcome.get_result()

    if report.when == "call" and report.failed:
        logger.error(f"\n🚨 [HOOK-MAKER] Prueba fallida: {item.nodeid}")
        _handle_failure_reporting(item, report)
