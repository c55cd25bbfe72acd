"""
Geodésicas de ᴮˢg sobre T*M y T*₁M.

El estado es (x, p, u, v): punto base, covector de la fibra, velocidad γ' y
velocidad covariante de la fibra v = ∇_{γ'}ϑ. Incluye los sistemas de
ecuaciones, la integración y los reportes de invariantes, residuos,
paralelismo y curvaturas de Frenet.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from geometria.base_geometry import (
    christoffel_along, covariant_derivative_along, curvature_operator, derivada_temporal, geometry_at,
)
from geometria.berger_sasaki import BergerSasakiConfig
from geometria.integradores import integrar
from utils import config
from utils.errores import DegenerateSpeed, GridTooCoarse, NotOnUnitBundle
from utils.logger import setup_logger

logger = setup_logger(name='geodesic_engine', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

# Muestras excluidas en cada extremo cuando se anidan derivadas temporales
MUESTRAS_BORDE = 4
# Violación grosera de r² = 1 que el sistema del fibrado unitario no acepta
TOLERANCIA_UNITARIA_RHS = 1e-3
TOLERANCIA_RANGO = 1e-8


@dataclass(frozen=True)
class GeodesicState:
    x: np.ndarray
    p: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def como_arreglo(self) -> np.ndarray:
        return np.concatenate([self.x, self.p, self.u, self.v]).astype(float)

    @classmethod
    def desde_arreglo(cls, y) -> "GeodesicState":
        y = np.asarray(y, dtype=float)
        n = y.shape[0] // 4
        return cls(y[:n].copy(), y[n:2 * n].copy(), y[2 * n:3 * n].copy(), y[3 * n:].copy())


@dataclass
class Trajectory:
    """Muestras (N, n) de cada componente del estado."""
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    u: np.ndarray
    v: np.ndarray
    modo: str = "total_space"
    metodo: str = "rk4"
    renormalizado: bool = False
    pasos_aceptados: int = 0
    pasos_rechazados: int = 0

    @classmethod
    def desde_muestras(cls, t, y, **kwargs) -> "Trajectory":
        y = np.asarray(y, dtype=float)
        n = y.shape[1] // 4
        return cls(np.asarray(t, dtype=float), y[:, :n], y[:, n:2 * n], y[:, 2 * n:3 * n], y[:, 3 * n:], **kwargs)

    def estado(self, k: int) -> GeodesicState:
        return GeodesicState(self.x[k], self.p[k], self.u[k], self.v[k])

    def __len__(self) -> int:
        return self.t.shape[0]


@dataclass(frozen=True)
class StepPolicy:
    """Integrador y control de paso."""
    metodo: str = "rk4"
    h: float = 1e-3
    atol: float = 1e-10
    rtol: float = 1e-10
    min_step: float = 1e-12
    renormalize: bool = False
    n_muestras: Optional[int] = None

    @classmethod
    def desde_settings(cls, cfg: BergerSasakiConfig, **kwargs) -> "StepPolicy":
        s = cfg.settings
        base = dict(atol=s.atol, rtol=s.rtol, min_step=s.min_step, renormalize=s.renormalize)
        base.update(kwargs)
        return cls(**base)


# --- Sistemas de ecuaciones ---

def _separar(y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = y.shape[0] // 4
    return y[:n], y[n:2 * n], y[2 * n:3 * n], y[3 * n:]


def _cantidades(cfg: BergerSasakiConfig, x, p, v):
    geo = geometry_at(cfg.chart, x, cfg.settings)
    J = cfg.kahler.J_at(geo.point)
    pJ = p @ J
    mu = float(v @ geo.g_inv @ pJ)
    p_sharp, v_sharp = geo.g_inv @ p, geo.g_inv @ v
    R = geo.riemann
    calR = (curvature_operator(R, v_sharp, p_sharp)
            + cfg.delta2 * mu * curvature_operator(R, p_sharp, J @ p_sharp))
    return geo, J, pJ, mu, calR


def _horizontal(geo, calR, u) -> np.ndarray:
    return -np.einsum('hij,i,j->h', geo.gamma, u, u) + calR @ u


def _transporte(geo, covector, u) -> np.ndarray:
    """Γ^i_jh ω_i u^j"""
    return np.einsum('ijh,i,j->h', geo.gamma, covector, u)


def total_space_rhs(cfg: BergerSasakiConfig, y) -> np.ndarray:
    """
    Geodésicas de T*M:
        dx/dt = u
        du/dt = −Γ(u,u) + ℛ(ṽ,p̃)u
        dp/dt = v + Γ^i_jh p_i u^j
        dv/dt = Γ^i_jh v_i u^j + 2δ²μ((δ²/λ) g⁻¹(v,p) pJ − vJ)
    """
    y = np.asarray(y, dtype=float)
    x, p, u, v = _separar(y)
    geo, J, pJ, mu, calR = _cantidades(cfg, x, p, v)
    lam = 1.0 + cfg.delta2 * float(p @ geo.g_inv @ p)
    s = float(v @ geo.g_inv @ p)
    dv = _transporte(geo, v, u) + 2.0 * cfg.delta2 * mu * ((cfg.delta2 / lam) * s * pJ - v @ J)
    return np.concatenate([u, v + _transporte(geo, p, u), _horizontal(geo, calR, u), dv])


def unit_bundle_rhs(cfg: BergerSasakiConfig, y) -> np.ndarray:
    """
    Geodésicas de T*₁M. La parte tangencial de la ecuación de la fibra es
    ϑ'' = −2δ²μ ϑ'J; la reacción normal −(κ² + 2δ²μ²)ϑ mantiene r² = 1.

    Raises:
        NotOnUnitBundle: si |r² − 1| > 1e-3.
    """
    y = np.asarray(y, dtype=float)
    x, p, u, v = _separar(y)
    geo, J, pJ, mu, calR = _cantidades(cfg, x, p, v)
    r2 = float(p @ geo.g_inv @ p)
    if abs(r2 - 1.0) > TOLERANCIA_UNITARIA_RHS:
        raise NotOnUnitBundle(f"El estado dejó el fibrado unitario: r² = {r2:.6g}")
    kappa2 = float(v @ geo.g_inv @ v)
    dv = (_transporte(geo, v, u) - 2.0 * cfg.delta2 * mu * (v @ J)
          - ((kappa2 + 2.0 * cfg.delta2 * mu * mu) / r2) * p)
    return np.concatenate([u, v + _transporte(geo, p, u), _horizontal(geo, calR, u), dv])


def horizontal_lift_rhs(cfg: BergerSasakiConfig, x, u, p) -> np.ndarray:
    """Transporte paralelo del covector: dp_h/dt = Γ^i_jh p_i u^j."""
    geo = geometry_at(cfg.chart, x, cfg.settings)
    return _transporte(geo, np.asarray(p, dtype=float), np.asarray(u, dtype=float))


def horizontal_lift_system_rhs(cfg: BergerSasakiConfig, y) -> np.ndarray:
    """Geodésica de la base más transporte paralelo de p (v ≡ 0)."""
    y = np.asarray(y, dtype=float)
    x, p, u, v = _separar(y)
    geo = geometry_at(cfg.chart, x, cfg.settings)
    du = -np.einsum('hij,i,j->h', geo.gamma, u, u)
    return np.concatenate([u, _transporte(geo, p, u), du, np.zeros_like(v)])


SISTEMAS: Dict[str, Callable[[BergerSasakiConfig, np.ndarray], np.ndarray]] = {
    "total_space": total_space_rhs,
    "unit_bundle": unit_bundle_rhs,
    "horizontal_lift": horizontal_lift_system_rhs,
}


# --- Datos iniciales y restricciones ---

def proyectar_fibrado_unitario(cfg: BergerSasakiConfig, y) -> np.ndarray:
    """p ↦ p/|p|, v ↦ v − g⁻¹(v,p)p"""
    y = np.asarray(y, dtype=float)
    x, p, u, v = _separar(y)
    g_inv = geometry_at(cfg.chart, x, cfg.settings).g_inv
    p = p / np.sqrt(float(p @ g_inv @ p))
    v = v - float(v @ g_inv @ p) * p
    return np.concatenate([x, p, u, v])


def unit_initial_state(cfg: BergerSasakiConfig, x, p, u, v) -> GeodesicState:
    """
    Dato inicial en T*₁M parametrizado por longitud de arco: proyecta p a r² = 1 y
    v ⟂ p, luego escala (u, v) para que |u|² + κ² + δ²μ² = 1.

    Raises:
        DegenerateSpeed: si (u, v) es nulo.
    """
    x = np.asarray(x, dtype=float)
    proyectado = GeodesicState.desde_arreglo(proyectar_fibrado_unitario(
        cfg, np.concatenate([x, np.asarray(p, float), np.asarray(u, float), np.asarray(v, float)])))
    geo = geometry_at(cfg.chart, x, cfg.settings)
    J = cfg.kahler.J_at(geo.point)
    u, v, p = proyectado.u, proyectado.v, proyectado.p
    mu = float(v @ geo.g_inv @ (p @ J))
    energia = float(u @ geo.g @ u) + float(v @ geo.g_inv @ v) + cfg.delta2 * mu * mu
    if energia <= 1e-20:
        raise DegenerateSpeed("La velocidad inicial (u, v) es nula; no se puede normalizar")
    escala = 1.0 / np.sqrt(energia)
    return GeodesicState(x, p, escala * u, escala * v)


def j_rotate_initial_data(cfg: BergerSasakiConfig, estado: GeodesicState) -> GeodesicState:
    """(p, v) ↦ (pJ, vJ) sobre el fibrado unitario."""
    geo = geometry_at(cfg.chart, estado.x, cfg.settings)
    r2 = float(estado.p @ geo.g_inv @ estado.p)
    if abs(r2 - 1.0) > cfg.settings.unit_tolerance:
        raise NotOnUnitBundle(f"|r² − 1| = {abs(r2 - 1.0):.3e} fuera de tolerancia")
    J = cfg.kahler.J_at(geo.point)
    return GeodesicState(estado.x.copy(), estado.p @ J, estado.u.copy(), estado.v @ J)


def estado_coordenado(cfg: BergerSasakiConfig, estado: GeodesicState) -> np.ndarray:
    """(z, ż) con z = (x, p) y ż = (u, dp/dt) para la ecuación geodésica coordenada."""
    geo = geometry_at(cfg.chart, estado.x, cfg.settings)
    dp = estado.v + _transporte(geo, estado.p, estado.u)
    return np.concatenate([estado.x, estado.p, estado.u, dp])


# --- Integración ---

def integrate(rhs: Callable[[np.ndarray], np.ndarray], estado: GeodesicState, t_span,
              politica: StepPolicy, cfg: Optional[BergerSasakiConfig] = None,
              modo: str = "total_space") -> Trajectory:
    """
    Integra el sistema autónomo `rhs` desde `estado`.

    Con `politica.renormalize` (requiere cfg) reproyecta a T*₁M tras cada paso.

    Raises:
        StepUnderflow, OutOfChart: propagados desde el integrador con el último estado válido.
    """
    post_paso = None
    if politica.renormalize:
        if cfg is None:
            raise ValueError("La renormalización necesita la configuración de la métrica")
        post_paso = lambda _t, y: proyectar_fibrado_unitario(cfg, y)

    t_muestras = None
    if politica.n_muestras is not None:
        t_muestras = np.linspace(float(t_span[0]), float(t_span[1]), int(politica.n_muestras))

    inicio = time.time()
    resultado = integrar(lambda _t, y: rhs(y), estado.como_arreglo(), t_span, metodo=politica.metodo,
                         h=politica.h, t_muestras=t_muestras, atol=politica.atol, rtol=politica.rtol,
                         min_step=politica.min_step, post_paso=post_paso)
    logger.info(f"\nPERFORMANCE: Trayectoria '{modo}' ({politica.metodo}, h={politica.h}) sobre {tuple(t_span)} "
                f"en {time.time() - inicio:.2f} s, {len(resultado.t)} muestras.")
    return Trajectory.desde_muestras(resultado.t, resultado.y, modo=modo, metodo=resultado.metodo,
                                     renormalizado=politica.renormalize,
                                     pasos_aceptados=resultado.pasos_aceptados,
                                     pasos_rechazados=resultado.pasos_rechazados)


# --- Reportes ---

@dataclass
class InvariantReport:
    t: np.ndarray
    kappa: np.ndarray
    mu: np.ndarray
    K: np.ndarray
    speed: np.ndarray
    r2: np.ndarray
    orth: np.ndarray
    drift: Dict[str, float] = field(default_factory=dict)
    desviacion_velocidad: float = float("nan")
    consistencia: float = float("nan")

    def como_dict(self) -> Dict:
        return {
            "drift": {k: float(v) for k, v in self.drift.items()},
            "desviacion_velocidad": float(self.desviacion_velocidad),
            "consistencia": float(self.consistencia),
            "K_inicial": float(self.K[0]),
            "muestras": int(self.t.shape[0]),
        }


def invariant_report(cfg: BergerSasakiConfig, traj: Trajectory) -> InvariantReport:
    """κ, μ, K, |γ'|, r² y g⁻¹(ϑ',ϑ) por muestra con sus derivas respecto del valor inicial."""
    n_muestras = len(traj)
    series = {nombre: np.empty(n_muestras) for nombre in ("kappa", "mu", "K", "speed", "r2", "orth")}
    for k in range(n_muestras):
        x, p, u, v = traj.x[k], traj.p[k], traj.u[k], traj.v[k]
        geo = geometry_at(cfg.chart, x, cfg.settings)
        J = cfg.kahler.J_at(geo.point)
        kappa2 = float(v @ geo.g_inv @ v)
        mu = float(v @ geo.g_inv @ (p @ J))
        series["kappa"][k] = np.sqrt(kappa2)
        series["mu"][k] = mu
        series["K"][k] = kappa2 + cfg.delta2 * mu * mu
        series["speed"][k] = np.sqrt(float(u @ geo.g @ u))
        series["r2"][k] = float(p @ geo.g_inv @ p)
        series["orth"][k] = float(v @ geo.g_inv @ p)

    drift = {nombre: float(np.max(np.abs(valores - valores[0]))) for nombre, valores in series.items()}
    reporte = InvariantReport(t=traj.t, drift=drift, **series)
    if traj.modo == "unit_bundle":
        esperada = np.sqrt(np.clip(1.0 - series["K"], 0.0, None))
        reporte.desviacion_velocidad = float(np.max(np.abs(series["speed"] - esperada)))
        reporte.consistencia = float(np.max(np.abs(series["speed"] ** 2 + series["K"] - 1.0)))
    logger.debug(f"\nDerivas de invariantes ({traj.modo}): {drift}")
    return reporte


@dataclass
class ResidualSeries:
    t: np.ndarray
    horizontal: np.ndarray
    fibra: np.ndarray
    total: np.ndarray
    excluidas: int = MUESTRAS_BORDE

    @property
    def maximo(self) -> float:
        return float(np.max(self.total))


def _campo_fibra(cfg: BergerSasakiConfig, geo, J, p, v, mu, unitario: bool) -> np.ndarray:
    if unitario:
        kappa2 = float(v @ geo.g_inv @ v)
        r2 = float(p @ geo.g_inv @ p)
        return -2.0 * cfg.delta2 * mu * (v @ J) - ((kappa2 + 2.0 * cfg.delta2 * mu * mu) / r2) * p
    lam = 1.0 + cfg.delta2 * float(p @ geo.g_inv @ p)
    s = float(v @ geo.g_inv @ p)
    return 2.0 * cfg.delta2 * mu * ((cfg.delta2 / lam) * s * (p @ J) - v @ J)


def geodesic_residual(cfg: BergerSasakiConfig, t, x, p, unitario: bool = False) -> ResidualSeries:
    """
    Residuo de las ecuaciones geodésicas para una curva muestreada (γ, ϑ):
    |∇γ' − ℛγ'|_g y |∇ϑ' − F|_{g⁻¹} por muestra, con γ' y ϑ' = ∇_{γ'}ϑ obtenidos
    por diferencias finitas. Se excluyen las primeras y últimas 4 muestras.

    Raises:
        GridTooCoarse: con menos de 9 muestras.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if t.shape[0] < 2 * MUESTRAS_BORDE + 1:
        raise GridTooCoarse(f"Se requieren al menos {2 * MUESTRAS_BORDE + 1} muestras, se recibieron {t.shape[0]}")
    gammas = christoffel_along(cfg.chart, x, cfg.settings)
    u = derivada_temporal(t, x)
    v = covariant_derivative_along(cfg.chart, t, x, u, p, kind="covector", gammas=gammas)
    aceleracion = covariant_derivative_along(cfg.chart, t, x, u, u, kind="vector", gammas=gammas)
    v_prima = covariant_derivative_along(cfg.chart, t, x, u, v, kind="covector", gammas=gammas)

    interior = slice(MUESTRAS_BORDE, t.shape[0] - MUESTRAS_BORDE)
    horizontal, fibra = [], []
    for k in range(t.shape[0])[interior]:
        geo, J, _pJ, mu, calR = _cantidades(cfg, x[k], p[k], v[k])
        r_h = aceleracion[k] - calR @ u[k]
        r_f = v_prima[k] - _campo_fibra(cfg, geo, J, p[k], v[k], mu, unitario)
        horizontal.append(np.sqrt(abs(float(r_h @ geo.g @ r_h))))
        fibra.append(np.sqrt(abs(float(r_f @ geo.g_inv @ r_f))))
    horizontal, fibra = np.asarray(horizontal), np.asarray(fibra)
    return ResidualSeries(t=t[interior], horizontal=horizontal, fibra=fibra,
                          total=np.sqrt(horizontal ** 2 + fibra ** 2))


@dataclass
class ParallelismSeries:
    t: np.ndarray
    residuo: np.ndarray
    norma_calR: np.ndarray

    @property
    def razon(self) -> float:
        """max ‖∇ℛ‖ / max ‖ℛ‖"""
        escala = float(np.max(self.norma_calR))
        return float(np.max(self.residuo)) / escala if escala > 0 else float(np.max(self.residuo))


def calR_along(cfg: BergerSasakiConfig, traj: Trajectory) -> np.ndarray:
    return np.stack([_cantidades(cfg, traj.x[k], traj.p[k], traj.v[k])[4] for k in range(len(traj))])


def parallelism_residual(cfg: BergerSasakiConfig, traj: Trajectory) -> ParallelismSeries:
    """‖∇_{γ'}ℛ‖ por muestra, con ℛ = ℛ(ϑ̃',ϑ̃) como tensor (1,1) a lo largo de γ."""
    serie = calR_along(cfg, traj)
    derivada = covariant_derivative_along(cfg.chart, traj.t, traj.x, traj.u, serie, kind="tensor11",
                                          settings=cfg.settings)
    return ParallelismSeries(
        t=traj.t,
        residuo=np.linalg.norm(derivada.reshape(len(traj), -1), axis=1),
        norma_calR=np.linalg.norm(serie.reshape(len(traj), -1), axis=1),
    )


def _derivadas_covariantes(cfg: BergerSasakiConfig, traj: Trajectory, orden: int) -> List[np.ndarray]:
    """[γ', ∇γ', ∇∇γ', ...] hasta `orden` términos, en el parámetro t."""
    gammas = christoffel_along(cfg.chart, traj.x, cfg.settings)
    derivadas = [traj.u]
    for _ in range(orden - 1):
        derivadas.append(covariant_derivative_along(cfg.chart, traj.t, traj.x, traj.u, derivadas[-1],
                                                    kind="vector", gammas=gammas))
    return derivadas


def derivative_norms(cfg: BergerSasakiConfig, traj: Trajectory, orden: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """
    |γ^(k)| para k = 1..orden (derivadas covariantes sucesivas).

    Returns:
        tuple: (tiempos interiores, normas de forma (N, orden)).
    """
    borde = MUESTRAS_BORDE * max(1, orden - 1)
    if len(traj) < 2 * borde + 1:
        raise GridTooCoarse(f"Se requieren al menos {2 * borde + 1} muestras para orden {orden}")
    derivadas = _derivadas_covariantes(cfg, traj, orden)
    interior = range(borde, len(traj) - borde)
    normas = np.empty((len(interior), orden))
    for fila, k in enumerate(interior):
        g = geometry_at(cfg.chart, traj.x[k], cfg.settings).g
        for j, d in enumerate(derivadas):
            normas[fila, j] = np.sqrt(abs(float(d[k] @ g @ d[k])))
    return traj.t[borde:len(traj) - borde], normas


@dataclass
class FrenetReport:
    t: np.ndarray
    curvaturas: np.ndarray
    estadisticas: List[Dict[str, float]]
    rango: np.ndarray
    rango_deficiente: bool
    error_ortonormalidad: float

    def como_dict(self) -> Dict:
        return {
            "estadisticas": self.estadisticas,
            "rango_minimo": int(np.min(self.rango)),
            "rango_deficiente": bool(self.rango_deficiente),
            "error_ortonormalidad": float(self.error_ortonormalidad),
            "muestras": int(self.t.shape[0]),
        }


def _gram_schmidt(vectores: List[np.ndarray], g: np.ndarray):
    """Gram-Schmidt modificado en la métrica g; devuelve marco, alturas h_i y rango."""
    marco, alturas = [], []
    for e in vectores:
        w = e.copy()
        for nu in marco:
            w = w - float(nu @ g @ w) * nu
        altura = np.sqrt(abs(float(w @ g @ w)))
        escala = max(1.0, np.sqrt(abs(float(e @ g @ e))))
        if altura < TOLERANCIA_RANGO * escala:
            alturas.append(0.0)
            break
        alturas.append(altura)
        marco.append(w / altura)
    return marco, alturas


def frenet_curvatures(cfg: BergerSasakiConfig, traj: Trajectory, n_muestras: int = 100) -> FrenetReport:
    """
    Curvaturas de Frenet k_1..k_{n−1} de la curva proyectada, reparametrizada por
    longitud de arco (ds/dt = √(1−K) en el fibrado unitario, |γ'| en otro caso).

    k_i = h_{i+1}/h_i, con h_i la altura de γ^(i) sobre el espacio generado por
    las derivadas anteriores (Gram-Schmidt en la métrica de la base).

    Raises:
        DegenerateSpeed: si 1 − K < 1e-10.
    """
    n = traj.x.shape[1]
    inv = invariant_report(cfg, traj)
    if traj.modo == "unit_bundle":
        holgura = 1.0 - float(inv.K[0])
        if holgura < 1e-10:
            raise DegenerateSpeed(f"1 − K = {holgura:.3e}: la curva proyectada es degenerada")
        velocidad = np.full(len(traj), np.sqrt(holgura))
    else:
        velocidad = inv.speed
        if float(np.min(velocidad)) < 1e-10:
            raise DegenerateSpeed("La velocidad de la curva proyectada se anula")

    derivadas = _derivadas_covariantes(cfg, traj, n)
    borde = MUESTRAS_BORDE * max(1, n - 1)
    if len(traj) < 2 * borde + 1:
        raise GridTooCoarse(f"Se requieren al menos {2 * borde + 1} muestras")
    indices = np.unique(np.linspace(borde, len(traj) - borde - 1, min(n_muestras, len(traj) - 2 * borde)).astype(int))

    curvaturas = np.zeros((indices.shape[0], n - 1))
    rango = np.empty(indices.shape[0], dtype=int)
    error_orto = 0.0
    for fila, k in enumerate(indices):
        g = geometry_at(cfg.chart, traj.x[k], cfg.settings).g
        c = velocidad[k]
        vectores = [d[k] / c ** (j + 1) for j, d in enumerate(derivadas)]
        marco, alturas = _gram_schmidt(vectores, g)
        rango[fila] = len(marco)
        for i in range(min(len(alturas) - 1, n - 1)):
            curvaturas[fila, i] = alturas[i + 1] / alturas[i] if alturas[i] > 0 else 0.0
        if marco:
            F = np.stack(marco)
            error_orto = max(error_orto, float(np.max(np.abs(F @ g @ F.T - np.eye(len(marco))))))

    estadisticas = []
    for i in range(n - 1):
        media = float(np.mean(curvaturas[:, i]))
        desviacion = float(np.std(curvaturas[:, i]))
        razon = desviacion / abs(media) if abs(media) > 1e-12 else desviacion
        estadisticas.append({"k": i + 1, "media": media, "desviacion": desviacion, "razon": razon})
    return FrenetReport(t=traj.t[indices], curvaturas=curvaturas, estadisticas=estadisticas, rango=rango,
                        rango_deficiente=bool(np.any(rango < n)), error_ortonormalidad=error_orto)


def trajectory_dataframe(traj: Trajectory, inv: InvariantReport) -> pd.DataFrame:
    """Tabla t, x1.., p1.., u1.., v1.., kappa, mu, K, speed, r2, orth."""
    n = traj.x.shape[1]
    columnas = {"t": traj.t}
    for nombre, datos in (("x", traj.x), ("p", traj.p), ("u", traj.u), ("v", traj.v)):
        for i in range(n):
            columnas[f"{nombre}{i + 1}"] = datos[:, i]
    for nombre in ("kappa", "mu", "K", "speed", "r2", "orth"):
        columnas[nombre] = getattr(inv, nombre)
    return pd.DataFrame(columnas)
