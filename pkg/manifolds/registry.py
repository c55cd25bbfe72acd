"""
Registro de variedades disponibles para los experimentos.

Cada entrada declara sus banderas (kahler, localmente simétrica, plana) y estas
se verifican al registrarla sobre 50 puntos muestreados: una bandera verdadera
debe cumplirse en todos los puntos y una falsa debe fallar en al menos uno.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from geometria.base_geometry import ManifoldChart, riemann_at, riemann_covariant_derivative
from geometria.kahler_structure import KahlerStructure, kahler_suite
from manifolds import controles, cp1, flat, paper_r2
from utils import config
from utils.config import NumericSettings, settings_por_defecto
from utils.errores import RegistrationError, UnknownManifold
from utils.logger import setup_logger

logger = setup_logger(name='registry', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

PUNTOS_VERIFICACION = 50
TOLERANCIA_KAHLER = 1e-6
TOLERANCIA_PLANA = 1e-6
TOLERANCIA_SIMETRICA = 1e-4


@dataclass(frozen=True)
class ManifoldRegistryEntry:
    id: str
    descripcion: str
    constructor: Callable[..., ManifoldChart] = field(repr=False)
    kahler: bool
    locally_symmetric: bool
    flat: bool
    chart_domain: str
    caja_muestreo: Tuple[Tuple[float, ...], Tuple[float, ...]]
    parametros: Dict = field(default_factory=dict)
    closed_form_geodesics: Optional[Dict] = None

    def carta(self) -> ManifoldChart:
        return self.constructor(**self.parametros)

    def muestrear_puntos(self, n: int, rng: np.random.Generator) -> np.ndarray:
        bajo, alto = (np.asarray(c, dtype=float) for c in self.caja_muestreo)
        return rng.uniform(bajo, alto, size=(n, bajo.shape[0]))

    def como_dict(self) -> Dict:
        return {
            "id": self.id,
            "descripcion": self.descripcion,
            "dim": self.carta().dim,
            "kahler": self.kahler,
            "locally_symmetric": self.locally_symmetric,
            "flat": self.flat,
            "chart_domain": self.chart_domain,
            "caja_muestreo": [list(c) for c in self.caja_muestreo],
            "parametros": dict(self.parametros),
            "closed_form_geodesics": self.closed_form_geodesics,
        }


def _entradas_declaradas() -> List[ManifoldRegistryEntry]:
    return [
        ManifoldRegistryEntry(
            id=paper_r2.ID,
            descripcion="R^2 con g = diag(x^2, y^2) y J no constante; plana y Kähler",
            constructor=paper_r2.construir_carta,
            kahler=True, locally_symmetric=True, flat=True,
            chart_domain=paper_r2.DOMINIO,
            caja_muestreo=paper_r2.CAJA_MUESTREO,
            closed_form_geodesics=paper_r2.DESCRIPTOR_CERRADO,
        ),
        ManifoldRegistryEntry(
            id=flat.ID,
            descripcion="C^m euclídeo con la estructura compleja estándar",
            constructor=flat.construir_carta,
            kahler=True, locally_symmetric=True, flat=True,
            chart_domain=flat.DOMINIO,
            caja_muestreo=flat.caja_muestreo(1),
            parametros={"m": 1},
        ),
        ManifoldRegistryEntry(
            id=cp1.ID,
            descripcion="CP^1 con Fubini-Study en la carta afín (curvatura 1)",
            constructor=cp1.construir_carta,
            kahler=True, locally_symmetric=True, flat=False,
            chart_domain=cp1.DOMINIO,
            caja_muestreo=cp1.CAJA_MUESTREO,
        ),
        ManifoldRegistryEntry(
            id=controles.ID_NO_SIMETRICA,
            descripcion="Control: Kähler conforme con curvatura no constante",
            constructor=controles.carta_no_simetrica,
            kahler=True, locally_symmetric=False, flat=False,
            chart_domain=controles.DOMINIO,
            caja_muestreo=controles.CAJA_MUESTREO,
        ),
        ManifoldRegistryEntry(
            id=controles.ID_NO_KAHLER,
            descripcion="Control: J estándar no hermítica para diag(1 + x^2 + y^2, 1)",
            constructor=controles.carta_no_kahler,
            kahler=False, locally_symmetric=False, flat=False,
            chart_domain=controles.DOMINIO,
            caja_muestreo=controles.CAJA_MUESTREO,
        ),
    ]


def residuos_banderas(entrada: ManifoldRegistryEntry, x, settings: NumericSettings) -> Dict[str, float]:
    """Residuos normalizados que deciden cada bandera en el punto x."""
    carta = entrada.carta()
    suite = kahler_suite(KahlerStructure(carta, settings), x)
    R = riemann_at(carta, x, settings)
    nabla_R = riemann_covariant_derivative(carta, x, settings)
    return {
        "kahler": max(suite.values()),
        "flat": float(np.max(np.abs(R))),
        "locally_symmetric": float(np.max(np.abs(nabla_R))) / max(float(np.max(np.abs(R))), 1.0),
    }


UMBRALES = {
    "kahler": TOLERANCIA_KAHLER,
    "flat": TOLERANCIA_PLANA,
    "locally_symmetric": TOLERANCIA_SIMETRICA,
}


def verificar_entrada(entrada: ManifoldRegistryEntry, n_puntos: int = PUNTOS_VERIFICACION, seed: int = 0,
                      settings: Optional[NumericSettings] = None) -> Dict[str, Dict[str, float]]:
    """
    Verifica las banderas declaradas de una entrada.

    Returns:
        dict: por bandera, el residuo máximo y mínimo sobre los puntos.

    Raises:
        RegistrationError: si alguna bandera no queda respaldada por los puntos.
    """
    s = settings if settings is not None else settings_por_defecto()
    rng = np.random.default_rng(seed)
    puntos = entrada.muestrear_puntos(n_puntos, rng)
    residuos = {bandera: [] for bandera in UMBRALES}
    for x in puntos:
        for bandera, valor in residuos_banderas(entrada, x, s).items():
            residuos[bandera].append(valor)

    resumen, fallos = {}, []
    for bandera, valores in residuos.items():
        declarada = getattr(entrada, bandera)
        umbral = UMBRALES[bandera]
        resumen[bandera] = {"max": float(np.max(valores)), "min": float(np.min(valores)), "umbral": umbral}
        if declarada and np.max(valores) >= umbral:
            fallos.append(f"{bandera}=True pero el residuo máximo es {np.max(valores):.3e} (umbral {umbral:.0e})")
        if not declarada and np.max(valores) < umbral:
            fallos.append(f"{bandera}=False pero todos los puntos la cumplen (máximo {np.max(valores):.3e})")

    if fallos:
        error_msg = f"\n❌ Registro de '{entrada.id}' rechazado: " + "; ".join(fallos)
        logger.critical(error_msg)
        raise RegistrationError(error_msg)
    logger.debug(f"\n✅ Banderas de '{entrada.id}' verificadas en {n_puntos} puntos: {resumen}")
    return resumen


_REGISTRO: Dict[str, ManifoldRegistryEntry] = {}


def registrar(entrada: ManifoldRegistryEntry) -> ManifoldRegistryEntry:
    verificar_entrada(entrada)
    _REGISTRO[entrada.id] = entrada
    return entrada


def _asegurar_registro() -> Dict[str, ManifoldRegistryEntry]:
    if not _REGISTRO:
        inicio = time.time()
        for entrada in _entradas_declaradas():
            registrar(entrada)
        logger.info(f"\nPERFORMANCE: Registro de {len(_REGISTRO)} variedades verificado en {time.time() - inicio:.2f} s")
    return _REGISTRO


def obtener_registro(manifold_id: str) -> ManifoldRegistryEntry:
    registro = _asegurar_registro()
    if manifold_id not in registro:
        raise UnknownManifold(f"Variedad desconocida '{manifold_id}'. Disponibles: {sorted(registro)}")
    return registro[manifold_id]


def list_manifolds() -> List[Dict]:
    """Listado estable (ordenado por id) con banderas y dominio."""
    registro = _asegurar_registro()
    return [
        {k: v for k, v in registro[i].como_dict().items() if k in ("id", "kahler", "locally_symmetric", "flat", "chart_domain")}
        for i in sorted(registro)
    ]


def describe_manifold(manifold_id: str) -> Dict:
    return obtener_registro(manifold_id).como_dict()
