"""
Geometría riemanniana sobre una única carta de coordenadas.

Convenciones de índices (arreglos numpy):
    g[i, j]            = g_ij
    dg[k, i, j]        = ∂_k g_ij
    gamma[k, i, j]     = Γ^k_ij
    riemann[a, i, j, k] = R^a_ijk  con  R(∂_i, ∂_j)∂_k = R^a_ijk ∂_a
    R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z

Los covectores se representan como vectores fila de componentes ω_i.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from utils import config
from utils.config import NumericSettings, settings_por_defecto
from utils.errores import GridTooCoarse, OutOfChart, SingularMetric
from utils.logger import setup_logger

logger = setup_logger(name='base_geometry', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

TIPOS_CAMPO = ("vector", "covector", "tensor11")


def _todo_el_espacio(x: np.ndarray) -> bool:
    return True


@dataclass(frozen=True)
class ManifoldChart:
    """
    Carta de una variedad riemanniana de dimensión par 2m.

    Args:
        dim (int): Dimensión 2m de la variedad.
        metric_at (Callable): x ↦ matriz simétrica g_ij(x).
        complex_structure_at (Callable, opcional): x ↦ matriz J^i_j(x).
        metric_jacobian_at (Callable, opcional): x ↦ arreglo ∂_k g_ij(x). Si falta se usan diferencias finitas.
        chart_domain (Callable): predicado de validez sobre x.
        nombre (str): Identificador legible para logs.
    """
    dim: int
    metric_at: Callable[[np.ndarray], np.ndarray]
    complex_structure_at: Optional[Callable[[np.ndarray], np.ndarray]] = None
    metric_jacobian_at: Optional[Callable[[np.ndarray], np.ndarray]] = None
    chart_domain: Callable[[np.ndarray], bool] = field(default=_todo_el_espacio)
    nombre: str = "carta"

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim <= 0 or self.dim % 2 != 0:
            raise ValueError(f"La dimensión de la carta debe ser un entero par positivo, se recibió {self.dim!r}")


def _settings(settings: Optional[NumericSettings]) -> NumericSettings:
    return settings if settings is not None else settings_por_defecto()


def validar_punto(chart: ManifoldChart, x) -> np.ndarray:
    """
    Convierte x a arreglo float y verifica que pertenezca al dominio de la carta.

    Raises:
        OutOfChart: Si la dimensión no coincide o el predicado de dominio falla.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (chart.dim,):
        raise OutOfChart(f"Punto de dimensión {x.shape} en la carta '{chart.nombre}' de dimensión {chart.dim}")
    if not np.all(np.isfinite(x)) or not chart.chart_domain(x):
        raise OutOfChart(f"El punto {x.tolist()} está fuera del dominio de la carta '{chart.nombre}'")
    return x


def paso_fd(x: np.ndarray, h0: float) -> np.ndarray:
    """Paso de diferencias finitas por coordenada: h = max(h0, h0·|x_k|)."""
    return np.maximum(h0, h0 * np.abs(x))


def derivada_central(funcion: Callable[[np.ndarray], np.ndarray], chart: ManifoldChart, x: np.ndarray,
                     h0: float, richardson: bool = False) -> np.ndarray:
    """
    Derivadas parciales centrales de una función matricial f(x).

    Returns:
        np.ndarray: Arreglo con el índice de derivación primero: out[k, ...] = ∂_k f(x).

    Raises:
        OutOfChart: Si algún punto del stencil sale del dominio.
    """
    pasos = paso_fd(x, h0)
    derivadas = []
    for k in range(x.shape[0]):
        e_k = np.zeros_like(x)
        e_k[k] = 1.0

        def cociente(h: float) -> np.ndarray:
            adelante, atras = x + h * e_k, x - h * e_k
            if not (chart.chart_domain(adelante) and chart.chart_domain(atras)):
                raise OutOfChart(f"El stencil de diferencias finitas en {x.tolist()} sale del dominio de '{chart.nombre}'")
            return (np.asarray(funcion(adelante)) - np.asarray(funcion(atras))) / (2.0 * h)

        d_h = cociente(pasos[k])
        if richardson:
            d_h2 = cociente(pasos[k] / 2.0)
            d_h = (4.0 * d_h2 - d_h) / 3.0
        derivadas.append(d_h)
    return np.stack(derivadas)


def metric_checked(chart: ManifoldChart, x) -> np.ndarray:
    """
    Evalúa g(x) y verifica simetría y definición positiva por Cholesky.

    Raises:
        SingularMetric: Si g no es simétrica o la factorización falla.
    """
    x = validar_punto(chart, x)
    g = np.asarray(chart.metric_at(x), dtype=float)
    if g.shape != (chart.dim, chart.dim):
        raise SingularMetric(f"La métrica de '{chart.nombre}' devolvió forma {g.shape}")
    escala = max(1.0, float(np.max(np.abs(g))))
    if np.max(np.abs(g - g.T)) > 1e-12 * escala:
        raise SingularMetric(f"La métrica de '{chart.nombre}' no es simétrica en {x.tolist()}")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as e:
        raise SingularMetric(f"Factorización de Cholesky fallida para '{chart.nombre}' en {x.tolist()}") from e
    return g


def inverse_metric_at(chart: ManifoldChart, x) -> np.ndarray:
    g = metric_checked(chart, x)
    g_inv = np.linalg.solve(g, np.eye(chart.dim))
    return 0.5 * (g_inv + g_inv.T)


def metric_jacobian(chart: ManifoldChart, x, settings: Optional[NumericSettings] = None) -> np.ndarray:
    """∂_k g_ij(x): analítico si la carta lo provee, diferencias centrales en otro caso."""
    s = _settings(settings)
    x = validar_punto(chart, x)
    if chart.metric_jacobian_at is not None:
        return np.asarray(chart.metric_jacobian_at(x), dtype=float)
    return derivada_central(chart.metric_at, chart, x, s.fd_step, s.richardson)


def christoffel_from(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij), simetrizado en los índices inferiores."""
    combinacion = np.einsum('ijl->lij', dg) + np.einsum('jil->lij', dg) - dg
    gamma = 0.5 * np.einsum('kl,lij->kij', g_inv, combinacion)
    return 0.5 * (gamma + np.transpose(gamma, (0, 2, 1)))


def christoffel_at(chart: ManifoldChart, x, settings: Optional[NumericSettings] = None) -> np.ndarray:
    """
    Símbolos de Christoffel Γ^k_ij de la conexión de Levi-Civita en x.

    Raises:
        OutOfChart: Si x (o el stencil) sale del dominio.
        SingularMetric: Si la métrica no es definida positiva.
    """
    x = validar_punto(chart, x)
    g_inv = inverse_metric_at(chart, x)
    return christoffel_from(g_inv, metric_jacobian(chart, x, settings))


def christoffel_jacobian(chart: ManifoldChart, x, settings: Optional[NumericSettings] = None) -> np.ndarray:
    """dgamma[l, k, i, j] = ∂_l Γ^k_ij por diferencias centrales."""
    s = _settings(settings)
    x = validar_punto(chart, x)
    return derivada_central(lambda y: christoffel_at(chart, y, s), chart, x, s.fd_step, s.richardson)


def riemann_from(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    """R^a_ijk = ∂_i Γ^a_jk − ∂_j Γ^a_ik + Γ^a_il Γ^l_jk − Γ^a_jl Γ^l_ik."""
    riemann = (np.einsum('iajk->aijk', dgamma) - np.einsum('jaik->aijk', dgamma)
               + np.einsum('ail,ljk->aijk', gamma, gamma) - np.einsum('ajl,lik->aijk', gamma, gamma))
    # antisimetría exacta en (i, j)
    return 0.5 * (riemann - np.transpose(riemann, (0, 2, 1, 3)))


def riemann_at(chart: ManifoldChart, x, settings: Optional[NumericSettings] = None) -> np.ndarray:
    """
    Tensor de curvatura R^a_ijk en x.

    Raises:
        OutOfChart: Si el stencil de diferencias finitas sale del dominio.
    """
    s = _settings(settings)
    x = validar_punto(chart, x)
    return riemann_from(christoffel_at(chart, x, s), christoffel_jacobian(chart, x, s))


def riemann_covariant_derivative(chart: ManifoldChart, x, settings: Optional[NumericSettings] = None,
                                 paso: float = 1e-3) -> np.ndarray:
    """
    ∇_l R^a_ijk en x. La derivada de R usa un paso mayor (`paso`) porque R ya
    proviene de diferencias finitas.

    Returns:
        np.ndarray: nabla_r[l, a, i, j, k].
    """
    s = _settings(settings)
    x = validar_punto(chart, x)
    gamma = christoffel_at(chart, x, s)
    riemann = riemann_from(gamma, christoffel_jacobian(chart, x, s))
    d_riemann = derivada_central(lambda y: riemann_at(chart, y, s), chart, x, paso)
    return (d_riemann
            + np.einsum('alb,bijk->laijk', gamma, riemann)
            - np.einsum('bli,abjk->laijk', gamma, riemann)
            - np.einsum('blj,aibk->laijk', gamma, riemann)
            - np.einsum('blk,aijb->laijk', gamma, riemann))


@dataclass(frozen=True)
class GeometryCache:
    """Datos geométricos inmutables en un punto; la curvatura se calcula solo si se pide."""
    chart: ManifoldChart
    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    gamma: np.ndarray
    settings: NumericSettings

    @cached_property
    def riemann(self) -> np.ndarray:
        return riemann_at(self.chart, self.point, self.settings)


def geometry_at(chart: ManifoldChart, x, settings: Optional[NumericSettings] = None) -> GeometryCache:
    s = _settings(settings)
    x = validar_punto(chart, x)
    g = metric_checked(chart, x)
    g_inv = inverse_metric_at(chart, x)
    gamma = christoffel_from(g_inv, metric_jacobian(chart, x, s))
    return GeometryCache(chart=chart, point=x, g=g, g_inv=g_inv, gamma=gamma, settings=s)


# --- Isomorfismos musicales y producto inverso ---

def sharp(chart: ManifoldChart, x, omega) -> np.ndarray:
    """ω̃ = g^{ij} ω_i ∂_j"""
    return inverse_metric_at(chart, x) @ np.asarray(omega, dtype=float)


def flat(chart: ManifoldChart, x, X) -> np.ndarray:
    """X̃ = g_ij X^i dx^j"""
    return metric_checked(chart, x) @ np.asarray(X, dtype=float)


def inner_inv(chart: ManifoldChart, x, omega, theta) -> float:
    """g⁻¹(ω, θ) = g^{ij} ω_i θ_j"""
    return float(np.asarray(omega, dtype=float) @ inverse_metric_at(chart, x) @ np.asarray(theta, dtype=float))


# --- Operaciones puntuales con datos ya calculados ---

def curvature_operator(riemann: np.ndarray, X, Y) -> np.ndarray:
    """Matriz de R(X,Y): M[a, k] = R^a_ijk X^i Y^j."""
    return np.einsum('aijk,i,j->ak', riemann, X, Y)


def covariant_derivative_vector(gamma: np.ndarray, X, Y, DY) -> np.ndarray:
    """(∇_X Y)^k = ∂_i Y^k X^i + Γ^k_ij X^i Y^j, con DY[k, i] = ∂_i Y^k."""
    return np.asarray(DY) @ X + np.einsum('kij,i,j->k', gamma, X, Y)


def covariant_derivative_covector(gamma: np.ndarray, X, theta, Dtheta) -> np.ndarray:
    """(∇_X θ)_h = ∂_i θ_h X^i − Γ^a_ih X^i θ_a, con Dtheta[h, i] = ∂_i θ_h."""
    return np.asarray(Dtheta) @ X - np.einsum('aih,i,a->h', gamma, X, theta)


def metric_compatibility_residual(chart: ManifoldChart, x, settings: Optional[NumericSettings] = None) -> float:
    """max |∂_k g_ij − Γ^l_ki g_lj − Γ^l_kj g_il|"""
    geo = geometry_at(chart, x, settings)
    dg = metric_jacobian(chart, x, settings)
    residuo = dg - np.einsum('lki,lj->kij', geo.gamma, geo.g) - np.einsum('lkj,il->kij', geo.gamma, geo.g)
    return float(np.max(np.abs(residuo)))


def bianchi_residual(riemann: np.ndarray) -> float:
    """max |R^a_ijk + R^a_jki + R^a_kij|"""
    ciclo = riemann + np.transpose(riemann, (0, 2, 3, 1)) + np.transpose(riemann, (0, 3, 1, 2))
    return float(np.max(np.abs(ciclo)))


# --- Derivadas a lo largo de curvas muestreadas ---

def derivada_temporal(t, f) -> np.ndarray:
    """
    Derivada temporal de muestras f[k, ...] sobre la malla t.

    En mallas uniformes usa diferencias centrales de 4º orden de 5 puntos (y
    stencils laterales de 5 puntos en los dos primeros/últimos nodos). En mallas
    no uniformes recurre a numpy.gradient de 2º orden.

    Raises:
        GridTooCoarse: Con menos de 5 muestras.
    """
    t = np.asarray(t, dtype=float)
    f = np.asarray(f, dtype=float)
    n = t.shape[0]
    if n < 5:
        raise GridTooCoarse(f"Se requieren al menos 5 muestras para derivar, se recibieron {n}")
    pasos = np.diff(t)
    if np.any(pasos <= 0):
        raise GridTooCoarse("La malla temporal debe ser estrictamente creciente")
    h = float(np.mean(pasos))
    if np.max(np.abs(pasos - h)) > 1e-9 * max(1.0, abs(h)):
        return np.gradient(f, t, axis=0, edge_order=2)

    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * h)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * h)
    return d


def christoffel_along(chart: ManifoldChart, x_muestras, settings: Optional[NumericSettings] = None) -> np.ndarray:
    """Γ en cada muestra: arreglo (N, n, n, n)."""
    return np.stack([christoffel_at(chart, x, settings) for x in np.asarray(x_muestras, dtype=float)])


def covariant_derivative_along(chart: ManifoldChart, t, x, u, w, kind: str = "vector",
                               settings: Optional[NumericSettings] = None,
                               gammas: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Derivada covariante ∇_{γ'} de un campo muestreado a lo largo de la curva γ.

    Args:
        chart (ManifoldChart): Carta base.
        t (array): Tiempos de muestreo (N,).
        x (array): Puntos de la curva (N, n).
        u (array): Velocidad γ' en cada muestra (N, n).
        w (array): Campo muestreado: (N, n) para vector/covector, (N, n, n) para tensor (1,1).
        kind (str): 'vector', 'covector' o 'tensor11'.
        gammas (array, opcional): Christoffel ya evaluados en las muestras.

    Returns:
        np.ndarray: Muestras de la derivada covariante, misma forma que w.

    Raises:
        GridTooCoarse: Con menos de 5 muestras.
        ValueError: Si `kind` no es válido.
    """
    if kind not in TIPOS_CAMPO:
        raise ValueError(f"Tipo de campo desconocido '{kind}'. Opciones: {TIPOS_CAMPO}")
    t = np.asarray(t, dtype=float)
    if t.shape[0] < 5:
        raise GridTooCoarse(f"Se requieren al menos 5 muestras, se recibieron {t.shape[0]}")
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if gammas is None:
        gammas = christoffel_along(chart, x, settings)

    dw = derivada_temporal(t, w)
    if kind == "vector":
        return dw + np.einsum('nhij,ni,nj->nh', gammas, u, w)
    if kind == "covector":
        return dw - np.einsum('nijh,ni,nj->nh', gammas, w, u)
    # (∇_u A)^h_k = dA^h_k/dt + Γ^h_ij u^i A^j_k − Γ^j_ik u^i A^h_j
    return (dw + np.einsum('nhij,ni,njk->nhk', gammas, u, w)
            - np.einsum('njik,ni,nhj->nhk', gammas, u, w))
