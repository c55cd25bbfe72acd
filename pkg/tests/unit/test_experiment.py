import json

import pytest

from bench.experiment import cargar_config, construir_config
from utils.errores import ConfigInvalid


def test_archivo_inexistente(tmp_path) -> None:
    """[ID: EX-T001] Un archivo de configuración inexistente es ConfigInvalid."""
    with pytest.raises(ConfigInvalid) as excinfo:
        cargar_config(str(tmp_path / "no_existe.json"))
    assert "no existe" in excinfo.value.errores[0]


def test_json_invalido(tmp_path) -> None:
    """[ID: EX-T002] Un documento que no es JSON o no es un objeto se rechaza."""
    roto = tmp_path / "roto.json"
    roto.write_text("{manifold: ", encoding="utf-8")
    with pytest.raises(ConfigInvalid):
        cargar_config(str(roto))
    lista = tmp_path / "lista.json"
    lista.write_text(json.dumps([1, 2]), encoding="utf-8")
    with pytest.raises(ConfigInvalid):
        cargar_config(str(lista))


def test_campo_desconocido() -> None:
    """[ID: EX-T003] Los campos fuera del esquema se nombran en el error."""
    with pytest.raises(ConfigInvalid) as excinfo:
        construir_config({"manifold": "cp1-fubini-study", "mode": "oracle_check", "velocidad_luz": 1})
    assert excinfo.value.errores == ["velocidad_luz: campo desconocido"]


def test_p0_no_unitario(ruta_datos) -> None:
    """[ID: EX-T004] En modo unit_bundle p0 debe cumplir g⁻¹(p0,p0) = 1."""
    with pytest.raises(ConfigInvalid) as excinfo:
        cargar_config(ruta_datos("cp1_fibrado_unitario_invalido.json"))
    assert any(e.startswith("p0:") for e in excinfo.value.errores)


def test_overrides_de_linea_de_comandos(ruta_datos) -> None:
    """[ID: EX-T005] t_end reemplaza el extremo de t_span y los None no sobrescriben."""
    cfg = cargar_config(ruta_datos("cp1_fibrado_unitario.json"), {"t_end": 2.5, "delta": 0.3, "step": None})
    assert cfg.t_span == [0.0, 2.5]
    assert cfg.delta == 0.3
    assert cfg.step == 0.001
    assert cfg.directorio_salida.endswith("cp1_fibrado_unitario")


def test_errores_acumulados() -> None:
    """[ID: EX-T006] Todos los campos inválidos se informan juntos."""
    with pytest.raises(ConfigInvalid) as excinfo:
        construir_config({"manifold": "esfera-s7", "mode": "caminar", "step": -1.0, "t_span": [1.0, 0.0]})
    prefijos = {e.split(":")[0] for e in excinfo.value.errores}
    assert {"mode", "step", "t_span", "manifold"} <= prefijos


def test_datos_iniciales_faltantes_y_fuera_de_carta() -> None:
    """[ID: EX-T007] Sin curva cerrada hacen falta x0, p0, u0 dentro del dominio de la carta."""
    with pytest.raises(ConfigInvalid) as excinfo:
        construir_config({"manifold": "paper-r2-kahler", "mode": "total_space", "x0": [1.0, 1.0]})
    assert any("faltan" in e for e in excinfo.value.errores)
    with pytest.raises(ConfigInvalid) as excinfo:
        construir_config({"manifold": "paper-r2-kahler", "mode": "total_space",
                          "x0": [-1.0, 1.0], "p0": [1.0, 0.0], "u0": [1.0, 0.0]})
    assert any(e.startswith("x0:") for e in excinfo.value.errores)


def test_curva_cerrada_solo_en_el_ejemplo_plano() -> None:
    """[ID: EX-T008] curva_cerrada requiere la variedad con geodésicas cerradas."""
    with pytest.raises(ConfigInvalid) as excinfo:
        construir_config({"manifold": "cp1-fubini-study", "mode": "horizontal_lift", "curva_cerrada": "C1"})
    assert any(e.startswith("curva_cerrada:") for e in excinfo.value.errores)


def test_residuo_solo_en_el_ejemplo_plano() -> None:
    """[ID: EX-T009] residual_check evalúa curvas de paper-r2-kahler; en otra variedad se rechaza."""
    with pytest.raises(ConfigInvalid) as excinfo:
        construir_config({"manifold": "cp1-fubini-study", "mode": "residual_check"})
    assert any(e.startswith("mode:") and "residual_check" in e for e in excinfo.value.errores)
    cfg = construir_config({"manifold": "paper-r2-kahler", "mode": "residual_check", "curva_cerrada": "C2"})
    assert cfg.mode == "residual_check"


def test_nombre_por_defecto_desde_el_archivo(tmp_path) -> None:
    """[ID: EX-T010] Sin `nombre`, el directorio de salida toma el nombre del archivo."""
    documento = {"manifold": "cp1-fubini-study", "mode": "oracle_check", "out_dir": str(tmp_path)}
    rutas = []
    for nombre in ("corrida_a", "corrida_b"):
        ruta = tmp_path / f"{nombre}.json"
        ruta.write_text(json.dumps(documento), encoding="utf-8")
        rutas.append(str(ruta))
    a, b = (cargar_config(r) for r in rutas)
    assert (a.nombre, b.nombre) == ("corrida_a", "corrida_b")
    assert a.directorio_salida != b.directorio_salida
    # un nombre explícito se respeta
    assert cargar_config(rutas[0], {"nombre": "propio"}).nombre == "propio"
