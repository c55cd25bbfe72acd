import json
import os
import pickle

import numpy as np
import pandas as pd
import pytest

from utils import config
from utils.config import NumericSettings, settings_por_defecto, validar_variables_numericas
from utils.errores import ConfigInvalid, GeometriaError, OutOfChart
from utils.report_handlers import escribir_csv_atomico, escribir_json_atomico, leer_json


def test_ajustes_numericos_del_ambiente() -> None:
    """[ID: UT-T001] settings_por_defecto refleja las constantes cargadas del ambiente."""
    ajustes = settings_por_defecto()
    assert isinstance(ajustes, NumericSettings)
    assert ajustes.fd_step == config.BSG_FD_STEP
    assert ajustes.unit_tolerance == config.BSG_UNIT_TOLERANCE
    assert ajustes.min_step == config.BSG_RK_MIN_STEP


@pytest.mark.parametrize("variable, valor", [
    ("BSG_RK_ATOL", "abc"),
    ("BSG_FD_STEP", "-1e-5"),
    ("BSG_RENORMALIZE", "quizas"),
])
def test_variables_de_entorno_invalidas(monkeypatch, variable, valor) -> None:
    """[ID: UT-T002] Un valor ilegible o no positivo detiene la configuración con EnvironmentError."""
    monkeypatch.setenv(variable, valor)
    with pytest.raises(EnvironmentError):
        validar_variables_numericas()


def test_json_atomico_determinista(tmp_path) -> None:
    """[ID: UT-T003] El JSON se escribe con claves ordenadas, tipos numpy convertidos y sin temporales."""
    ruta = str(tmp_path / "reportes" / "reporte.json")
    escribir_json_atomico(ruta, {"b": np.float64(0.1), "a": np.arange(3), "pasa": np.bool_(True)})
    assert leer_json(ruta) == {"a": [0, 1, 2], "b": 0.1, "pasa": True}
    with open(ruta, encoding="utf-8") as archivo:
        assert list(json.load(archivo)) == ["a", "b", "pasa"]
    assert os.listdir(tmp_path / "reportes") == ["reporte.json"]
    with pytest.raises(FileNotFoundError):
        leer_json(str(tmp_path / "no_existe.json"))


def test_csv_con_precision_completa(tmp_path) -> None:
    """[ID: UT-T004] El CSV conserva cada float exactamente."""
    ruta = str(tmp_path / "tabla.csv")
    tabla = pd.DataFrame({"t": [0.0, 0.1, 1.0 / 3.0], "r2": [1.0, 1.0 + 1e-15, np.pi]})
    escribir_csv_atomico(ruta, tabla)
    leida = pd.read_csv(ruta, float_precision="round_trip")
    assert leida["t"].tolist() == tabla["t"].tolist()
    assert leida["r2"].tolist() == tabla["r2"].tolist()


def test_errores_serializables() -> None:
    """[ID: UT-T005] ConfigInvalid conserva su lista de errores al cruzar procesos."""
    error = pickle.loads(pickle.dumps(ConfigInvalid(["mode: inválido", "step: debe ser > 0"])))
    assert isinstance(error, GeometriaError)
    assert error.errores == ["mode: inválido", "step: debe ser > 0"]
    salida = OutOfChart("fuera", ultimo_estado=np.zeros(2), ultimo_t=0.5)
    assert salida.ultimo_t == 0.5
    assert isinstance(pickle.loads(pickle.dumps(salida)), OutOfChart)
