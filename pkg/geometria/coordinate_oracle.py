"""
Camino de verificación independiente: la métrica inducida de ᴮˢg en las
coordenadas (x^i, p_i) de T*M, sus Christoffel por diferencias finitas y la
derivada covariante en coordenadas. Solo lo usan las pruebas y el comando verify.
"""
import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from geometria.base_geometry import ManifoldChart, christoffel_at, christoffel_from, geometry_at
from geometria.berger_sasaki import (
    BergerSasakiConfig, CampoGerm, CotangentPoint, LiftedVector, bs_connection, bs_metric,
    coords_to_lifted, cotangent_point, lifted, lifted_to_coords, unit_bundle_connection,
)
from utils import config
from utils.logger import setup_logger

logger = setup_logger(name='coordinate_oracle', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

CampoCoordenadas = Callable[[np.ndarray], np.ndarray]


def induced_metric_at(cfg: BergerSasakiConfig, x, p) -> np.ndarray:
    """
    Matriz G_AB de ᴮˢg en el marco coordenado {∂_i, ∂_ī}.

    Con ∂_i = ᴴ∂_i − N_hi ⱽdx^h (N_hi = p_a Γ^a_hi) y W = g⁻¹ + δ² a aᵀ, a = g⁻¹(pJ):
        G = [[g + Nᵀ W N, −Nᵀ W], [−W N, W]]
    """
    geo = geometry_at(cfg.chart, x, cfg.settings)
    p = np.asarray(p, dtype=float)
    J = cfg.kahler.J_at(geo.point)
    N = np.einsum('a,ahi->hi', p, geo.gamma)
    a = geo.g_inv @ (p @ J)
    W = geo.g_inv + cfg.delta2 * np.outer(a, a)
    NtW = N.T @ W
    G = np.block([[geo.g + NtW @ N, -NtW], [-NtW.T, W]])
    return 0.5 * (G + G.T)


@dataclass(frozen=True)
class InducedMetric:
    """La métrica inducida como carta de dimensión 4m (sin estructura compleja)."""
    cfg: BergerSasakiConfig

    @property
    def n(self) -> int:
        return self.cfg.chart.dim

    def eval_at(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return induced_metric_at(self.cfg, z[:self.n], z[self.n:])

    def como_carta(self) -> ManifoldChart:
        n = self.n
        base = self.cfg.chart
        return ManifoldChart(
            dim=2 * n,
            metric_at=self.eval_at,
            chart_domain=lambda z: bool(base.chart_domain(np.asarray(z)[:n])),
            nombre=f"T*({base.nombre})",
        )


def induced_christoffel_at(cfg: BergerSasakiConfig, x, p) -> np.ndarray:
    """Γ̂^C_AB de G por diferencias centrales con h = fd_step por componente de (x, p)."""
    z = np.concatenate([np.asarray(x, dtype=float), np.asarray(p, dtype=float)])
    return christoffel_at(InducedMetric(cfg).como_carta(), z, cfg.settings)


def campo_en_coordenadas(cfg: BergerSasakiConfig, germ: CampoGerm, x0) -> CampoCoordenadas:
    """
    Expresión coordenada z ↦ (X(y), ω(y) + N(y,q)X(y)) del campo levantado
    definido por el germen alrededor de x0, con z = (y, q).
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.shape[0]

    def campo(z: np.ndarray) -> np.ndarray:
        y, q = z[:n], z[n:]
        geo = geometry_at(cfg.chart, y, cfg.settings)
        X = germ.campo_X(x0, y)
        omega = germ.campo_omega(x0, y)
        if germ.tangencial:
            omega = omega - float(omega @ geo.g_inv @ q) * q
        omega = omega + germ.liouville * q
        N = np.einsum('a,aij->ij', q, geo.gamma)
        return np.concatenate([X, omega + N @ X])

    return campo


def _derivada_direccional(campo: CampoCoordenadas, z: np.ndarray, direccion: np.ndarray, h0: float) -> np.ndarray:
    norma = float(np.linalg.norm(direccion))
    if norma == 0.0:
        return np.zeros_like(campo(z))
    h = h0 * max(1.0, float(np.linalg.norm(z))) / norma
    return (campo(z + h * direccion) - campo(z - h * direccion)) / (2.0 * h)


def oracle_connection(cfg: BergerSasakiConfig, x, p, U: CampoGerm, V: CampoGerm,
                      gamma_hat: np.ndarray = None) -> np.ndarray:
    """
    ∇̂_U V = U^A ∂_A V^C + Γ̂^C_AB U^A V^B en coordenadas inducidas.

    Returns:
        np.ndarray: Vector de 4m componentes.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    z = np.concatenate([x, p])
    if gamma_hat is None:
        gamma_hat = induced_christoffel_at(cfg, x, p)
    campo_U = campo_en_coordenadas(cfg, U, x)
    campo_V = campo_en_coordenadas(cfg, V, x)
    U_z, V_z = campo_U(z), campo_V(z)
    return (_derivada_direccional(campo_V, z, U_z, cfg.settings.fd_step)
            + np.einsum('cab,a,b->c', gamma_hat, U_z, V_z))


def oracle_unit_connection(cfg: BergerSasakiConfig, x, p, U: CampoGerm, V: CampoGerm,
                           gamma_hat: np.ndarray = None) -> np.ndarray:
    """Conexión del oráculo proyectada con la fórmula de Gauss sobre 𝒩 = (0, p)."""
    resultado = oracle_connection(cfg, x, p, U, V, gamma_hat)
    n = np.asarray(x).shape[0]
    G = induced_metric_at(cfg, x, p)
    normal = np.concatenate([np.zeros(n), np.asarray(p, dtype=float)])
    return resultado - (resultado @ G @ normal) / (normal @ G @ normal) * normal


def oracle_bracket(cfg: BergerSasakiConfig, x, p, U: CampoGerm, V: CampoGerm) -> np.ndarray:
    """[U,V]^C = U^A ∂_A V^C − V^A ∂_A U^C en coordenadas."""
    z = np.concatenate([np.asarray(x, dtype=float), np.asarray(p, dtype=float)])
    campo_U = campo_en_coordenadas(cfg, U, x)
    campo_V = campo_en_coordenadas(cfg, V, x)
    h0 = cfg.settings.fd_step
    return (_derivada_direccional(campo_V, z, campo_U(z), h0)
            - _derivada_direccional(campo_U, z, campo_V(z), h0))


def koszul_inner(cfg: BergerSasakiConfig, x, p, U: CampoGerm, V: CampoGerm, W: CampoGerm) -> float:
    """
    2ᴮˢg(∇_U V, W) por la fórmula de Koszul, sin Christoffels:
    U(G(V,W)) + V(G(U,W)) − W(G(U,V)) + G([U,V],W) − G([U,W],V) − G([V,W],U)
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    z = np.concatenate([x, p])
    n = x.shape[0]
    campos = {nombre: campo_en_coordenadas(cfg, germ, x) for nombre, germ in (("U", U), ("V", V), ("W", W))}
    metrica = InducedMetric(cfg)
    h0 = cfg.settings.fd_step

    def producto(a: str, b: str) -> Callable[[np.ndarray], np.ndarray]:
        return lambda y: np.atleast_1d(campos[a](y) @ metrica.eval_at(y) @ campos[b](y))

    def corchete(a: str, b: str) -> np.ndarray:
        return (_derivada_direccional(campos[b], z, campos[a](z), h0)
                - _derivada_direccional(campos[a], z, campos[b](z), h0))

    G = metrica.eval_at(z)
    valores = {k: c(z) for k, c in campos.items()}
    total = (_derivada_direccional(producto("V", "W"), z, valores["U"], h0)[0]
             + _derivada_direccional(producto("U", "W"), z, valores["V"], h0)[0]
             - _derivada_direccional(producto("U", "V"), z, valores["W"], h0)[0]
             + corchete("U", "V") @ G @ valores["W"]
             - corchete("U", "W") @ G @ valores["V"]
             - corchete("V", "W") @ G @ valores["U"])
    logger.debug(f"\nKoszul en x={x.tolist()}, p={p.tolist()} (dim {2 * n}): {total:.6e}")
    return float(total)


def oracle_geodesic_rhs(cfg: BergerSasakiConfig, estado) -> np.ndarray:
    """
    Ecuación geodésica coordenada de G: estado = (z, ż) con z ∈ R^{2n};
    devuelve (ż, −Γ̂(ż, ż)).
    """
    estado = np.asarray(estado, dtype=float)
    dim_total = estado.shape[0] // 2
    n = dim_total // 2
    z, zdot = estado[:dim_total], estado[dim_total:]
    gamma_hat = induced_christoffel_at(cfg, z[:n], z[n:])
    return np.concatenate([zdot, -np.einsum('cab,a,b->c', gamma_hat, zdot, zdot)])


def desviacion_relativa(cerrada: np.ndarray, oraculo: np.ndarray) -> float:
    return float(np.linalg.norm(cerrada - oraculo) / max(float(np.linalg.norm(oraculo)), 1.0))


# --- Reporte de comparación ---

CASOS_CONEXION = ("HH", "HV", "VH", "VV", "general")
CASOS_UNITARIOS = ("unit_HH", "unit_HT", "unit_TH", "unit_TT", "unit_general")


def _germenes_por_caso(caso: str, U: CampoGerm, V: CampoGerm):
    cero = np.zeros_like(U.X)
    def solo(germ, horizontal: bool, vertical: bool):
        return CampoGerm(germ.X if horizontal else cero, germ.omega if vertical else cero,
                         germ.DX, germ.Domega, germ.tangencial)
    tabla = {
        "HH": (True, False, True, False), "HV": (True, False, False, True),
        "VH": (False, True, True, False), "VV": (False, True, False, True),
        "HT": (True, False, False, True), "TH": (False, True, True, False),
        "TT": (False, True, False, True), "general": (True, True, True, True),
    }
    uh, uv, vh, vv = tabla[caso]
    return solo(U, uh, uv), solo(V, vh, vv)


def oracle_report(cfg: BergerSasakiConfig, configuraciones: List[Dict]) -> Dict:
    """
    Compara la conexión cerrada con la del oráculo caso por caso.

    Args:
        cfg: configuración de la métrica.
        configuraciones: lista de diccionarios con claves x, p, U, V (gérmenes de
            levantamientos) y, opcionalmente, p_unit, U_t, V_t (gérmenes tangenciales
            en un punto del fibrado unitario).

    Returns:
        dict: desviaciones máximas y medias por caso y las de las derivadas del campo de Liouville.
    """
    inicio = time.time()
    desviaciones: Dict[str, List[float]] = {caso: [] for caso in CASOS_CONEXION + CASOS_UNITARIOS}
    desviaciones["liouville"] = []

    for conf in configuraciones:
        x, p = conf["x"], conf["p"]
        cp = cotangent_point(cfg, x, p)
        gamma_hat = induced_christoffel_at(cfg, x, p)
        for caso in CASOS_CONEXION:
            U, V = _germenes_por_caso(caso, conf["U"], conf["V"])
            cerrada = lifted_to_coords(cfg, bs_connection(cfg, cp, U, V))
            desviaciones[caso].append(desviacion_relativa(cerrada, oracle_connection(cfg, x, p, U, V, gamma_hat)))

        # ∇_{ⱽω}ⱽp y ∇_{ⱽp}ⱽp
        n = cp.x.shape[0]
        cero = np.zeros(n)
        liouville = CampoGerm(cero, cero, np.zeros((n, n)), np.zeros((n, n)), liouville=1.0)
        vertical = CampoGerm(cero, conf["U"].omega, np.zeros((n, n)), np.zeros((n, n)))
        for U, V in ((vertical, liouville), (liouville, liouville), (liouville, vertical)):
            cerrada = lifted_to_coords(cfg, bs_connection(cfg, cp, U, V))
            desviaciones["liouville"].append(desviacion_relativa(cerrada, oracle_connection(cfg, x, p, U, V, gamma_hat)))

        if "p_unit" in conf:
            p_u = conf["p_unit"]
            cp_u = cotangent_point(cfg, x, p_u)
            gamma_hat_u = induced_christoffel_at(cfg, x, p_u)
            for caso in ("HH", "HT", "TH", "TT", "general"):
                U, V = _germenes_por_caso(caso, conf["U_t"], conf["V_t"])
                cerrada = lifted_to_coords(cfg, unit_bundle_connection(cfg, cp_u, U, V))
                oraculo = oracle_unit_connection(cfg, x, p_u, U, V, gamma_hat_u)
                desviaciones[f"unit_{caso}"].append(desviacion_relativa(cerrada, oraculo))

    resumen = {}
    for caso, valores in desviaciones.items():
        if valores:
            resumen[caso] = {"max": float(np.max(valores)), "media": float(np.mean(valores)), "n": len(valores)}
    maximo = max((r["max"] for r in resumen.values()), default=0.0)
    logger.info(f"\nPERFORMANCE: Reporte del oráculo ({len(configuraciones)} configuraciones, δ={cfg.delta}) "
                f"en {time.time() - inicio:.2f} s. Desviación máxima: {maximo:.3e}")
    return {"delta": cfg.delta, "casos": resumen, "desviacion_maxima": maximo, "configuraciones": len(configuraciones)}


def frame_round_trip_error(cfg: BergerSasakiConfig, cp: CotangentPoint, V: LiftedVector) -> float:
    """adaptado → coordenadas → adaptado"""
    regreso = coords_to_lifted(cfg, cp, lifted_to_coords(cfg, V))
    return float(np.max(np.abs(regreso.como_arreglo() - V.como_arreglo())))


def metric_frame_consistency(cfg: BergerSasakiConfig, cp: CotangentPoint, U: LiftedVector, V: LiftedVector) -> float:
    """|U_zᵀ G V_z − ᴮˢg(U,V)|"""
    G = induced_metric_at(cfg, cp.x, cp.p)
    return abs(float(lifted_to_coords(cfg, U) @ G @ lifted_to_coords(cfg, V)) - bs_metric(cfg, cp, U, V))


def sasaki_reference_connection(cfg: BergerSasakiConfig, x, p, U: CampoGerm, V: CampoGerm) -> LiftedVector:
    """Conexión del oráculo para la métrica de Sasaki clásica (δ = 0) en el marco adaptado."""
    sasaki = BergerSasakiConfig(delta=0.0, chart=cfg.chart, kahler=cfg.kahler, settings=cfg.settings)
    cp = cotangent_point(sasaki, x, p)
    return coords_to_lifted(sasaki, cp, oracle_connection(sasaki, x, p, U, V))
