"""
Configuración de experimentos: un documento JSON por experimento, con
sobrescritura de campos de primer nivel desde la línea de comandos.
"""
import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Dict, List, Optional

import numpy as np

from geometria.base_geometry import inverse_metric_at
from geometria.integradores import METODOS
from manifolds import paper_r2
from manifolds.registry import obtener_registro
from utils import config
from utils.errores import ConfigInvalid, UnknownManifold
from utils.logger import setup_logger

logger = setup_logger(name='experiment', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

MODOS = ("total_space", "unit_bundle", "horizontal_lift", "residual_check", "oracle_check")
MODOS_INTEGRACION = ("total_space", "unit_bundle", "horizontal_lift")


@dataclass
class ExperimentConfig:
    manifold: str
    mode: str
    delta: float = 0.0
    nombre: str = "experimento"
    x0: Optional[List[float]] = None
    p0: Optional[List[float]] = None
    u0: Optional[List[float]] = None
    v0: Optional[List[float]] = None
    curva_cerrada: Optional[str] = None
    parametros_curva: Dict[str, float] = field(default_factory=dict)
    longitud_arco: bool = False
    t_span: List[float] = field(default_factory=lambda: [0.0, 1.0])
    integrator: str = "rk4"
    step: float = 1e-3
    atol: float = config.BSG_RK_ATOL
    rtol: float = config.BSG_RK_RTOL
    min_step: float = config.BSG_RK_MIN_STEP
    renormalize: bool = config.BSG_RENORMALIZE
    n_muestras: Optional[int] = None
    n_configuraciones: int = 100
    perturbacion: float = 0.0
    frenet: bool = False
    seed: int = 0
    out_dir: str = config.BSG_OUT_DIR

    def como_dict(self) -> Dict:
        return asdict(self)

    @property
    def directorio_salida(self) -> str:
        return os.path.join(self.out_dir, self.nombre)


CAMPOS_VALIDOS = {f.name for f in fields(ExperimentConfig)}


def _vector(valor, nombre: str, dim: int, errores: List[str]) -> Optional[np.ndarray]:
    if valor is None:
        return None
    try:
        arreglo = np.asarray(valor, dtype=float)
    except (TypeError, ValueError):
        errores.append(f"{nombre}: debe ser una lista de números")
        return None
    if arreglo.shape != (dim,):
        errores.append(f"{nombre}: se esperaban {dim} componentes, se recibieron {arreglo.size}")
        return None
    if not np.all(np.isfinite(arreglo)):
        errores.append(f"{nombre}: contiene valores no finitos")
        return None
    return arreglo


def validar_config(cfg: ExperimentConfig) -> None:
    """
    Reúne todos los errores de campo antes de fallar.

    Raises:
        ConfigInvalid: con un mensaje por campo inválido.
    """
    errores: List[str] = []
    if cfg.mode not in MODOS:
        errores.append(f"mode: '{cfg.mode}' no es válido; opciones {list(MODOS)}")
    if cfg.integrator not in METODOS:
        errores.append(f"integrator: '{cfg.integrator}' no es válido; opciones {sorted(METODOS)}")
    if not (isinstance(cfg.t_span, (list, tuple)) and len(cfg.t_span) == 2) or not float(cfg.t_span[1]) > float(cfg.t_span[0]):
        errores.append(f"t_span: se esperaba [t0, t1] con t1 > t0, se recibió {cfg.t_span}")
    for nombre in ("step", "atol", "rtol", "min_step"):
        if not float(getattr(cfg, nombre)) > 0:
            errores.append(f"{nombre}: debe ser > 0")
    if cfg.n_muestras is not None and int(cfg.n_muestras) < 2:
        errores.append("n_muestras: debe ser al menos 2")
    if int(cfg.n_configuraciones) < 1:
        errores.append("n_configuraciones: debe ser al menos 1")
    if cfg.curva_cerrada is not None and cfg.curva_cerrada not in paper_r2.CURVAS_CERRADAS:
        errores.append(f"curva_cerrada: '{cfg.curva_cerrada}' no existe; opciones {sorted(paper_r2.CURVAS_CERRADAS)}")
    if cfg.curva_cerrada is not None and cfg.manifold != paper_r2.ID:
        errores.append(f"curva_cerrada: solo está disponible en '{paper_r2.ID}'")
    if cfg.mode == "residual_check" and cfg.manifold != paper_r2.ID:
        errores.append(f"mode: residual_check evalúa las curvas cerradas de '{paper_r2.ID}', no de '{cfg.manifold}'")
    try:
        paper_r2.ParametrosEjemplo.desde_dict(cfg.parametros_curva)
    except (TypeError, ValueError) as e:
        errores.append(f"parametros_curva: {e}")

    try:
        entrada = obtener_registro(cfg.manifold)
    except UnknownManifold as e:
        errores.append(f"manifold: {e}")
        entrada = None

    if entrada is not None and cfg.mode in MODOS_INTEGRACION and cfg.curva_cerrada is None:
        carta = entrada.carta()
        dim = carta.dim
        datos = {n: _vector(getattr(cfg, n), n, dim, errores) for n in ("x0", "p0", "u0", "v0")}
        faltantes = [n for n in ("x0", "p0", "u0") if getattr(cfg, n) is None]
        if faltantes:
            errores.append(f"datos iniciales: faltan {faltantes} (o indique curva_cerrada)")
        elif all(datos[n] is not None for n in ("x0", "p0", "u0")):
            x0 = datos["x0"]
            if not carta.chart_domain(x0):
                errores.append(f"x0: {x0.tolist()} está fuera del dominio de la carta ({entrada.chart_domain})")
            elif cfg.mode == "unit_bundle":
                g_inv = inverse_metric_at(carta, x0)
                p0 = datos["p0"]
                v0 = datos["v0"] if datos["v0"] is not None else np.zeros(dim)
                r2 = float(p0 @ g_inv @ p0)
                if abs(r2 - 1.0) >= 1e-9:
                    errores.append(f"p0: no es unitario (g⁻¹(p0,p0) = {r2:.12g})")
                if abs(float(v0 @ g_inv @ p0)) >= 1e-9:
                    errores.append(f"v0: no es ortogonal a p0 (g⁻¹(v0,p0) = {float(v0 @ g_inv @ p0):.3e})")

    if errores:
        logger.error(f"\n❌ Configuración inválida ({len(errores)} errores): {errores}")
        raise ConfigInvalid(errores)


def construir_config(datos: Dict, overrides: Optional[Dict] = None) -> ExperimentConfig:
    """Combina el documento con los overrides (los valores None se ignoran) y valida."""
    combinados = dict(datos)
    for clave, valor in (overrides or {}).items():
        if valor is not None:
            combinados[clave] = valor
    t_end = combinados.pop("t_end", None)
    desconocidos = sorted(set(combinados) - CAMPOS_VALIDOS)
    if desconocidos:
        raise ConfigInvalid([f"{c}: campo desconocido" for c in desconocidos])
    faltantes = [c for c in ("manifold", "mode") if c not in combinados]
    if faltantes:
        raise ConfigInvalid([f"{c}: campo obligatorio" for c in faltantes])
    cfg = ExperimentConfig(**combinados)
    if t_end is not None:
        cfg.t_span = [float(cfg.t_span[0]), float(t_end)]
    validar_config(cfg)
    return cfg


def cargar_config(ruta: str, overrides: Optional[Dict] = None) -> ExperimentConfig:
    """
    Lee un JSON de experimento.

    Args:
        ruta (str): Archivo de configuración. Si el documento no trae `nombre`, se usa el
            nombre del archivo sin extensión.
        overrides (dict, opcional): campos de primer nivel a reemplazar (p. ej. desde la CLI);
            `t_end` reemplaza el extremo final de t_span.

    Raises:
        ConfigInvalid: si el archivo no existe, no es JSON o algún campo es inválido.
    """
    if not os.path.exists(ruta):
        raise ConfigInvalid([f"config: el archivo '{ruta}' no existe"])
    try:
        with open(ruta, "r", encoding="utf-8") as archivo:
            datos = json.load(archivo)
    except json.JSONDecodeError as e:
        raise ConfigInvalid([f"config: JSON inválido ({e})"]) from e
    if not isinstance(datos, dict):
        raise ConfigInvalid(["config: el documento debe ser un objeto JSON"])
    # sin nombre, cada archivo escribe en su propio directorio
    datos.setdefault("nombre", os.path.splitext(os.path.basename(ruta))[0])
    overrides = dict(overrides or {})
    t_end = overrides.pop("t_end", None)
    if t_end is not None:
        t_span = list(overrides.get("t_span") or datos.get("t_span") or [0.0, 1.0])
        overrides["t_span"] = [float(t_span[0]), float(t_end)]
    logger.info(f"\nConfiguración cargada desde '{ruta}' con overrides {sorted(k for k, v in overrides.items() if v is not None)}")
    return construir_config(datos, overrides)
