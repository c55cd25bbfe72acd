"""
Estructura casi compleja J sobre una carta: verificaciones casi compleja,
hermítica, Nijenhuis, Kähler (∇J = 0), forma fundamental e identidades de curvatura.

Convención: J[i, j] = J^i_j (columna j = J∂_j); la acción sobre covectores es
(ωJ)_j = ω_i J^i_j, es decir `omega @ J`.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from geometria.base_geometry import (
    ManifoldChart, christoffel_at, curvature_operator, derivada_central, geometry_at,
    metric_checked, inverse_metric_at, riemann_at, validar_punto,
)
from utils import config
from utils.config import NumericSettings, settings_por_defecto
from utils.logger import setup_logger

logger = setup_logger(name='kahler_structure', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)


@dataclass(frozen=True)
class KahlerStructure:
    """Par (carta, J). La carta debe traer `complex_structure_at`."""
    chart: ManifoldChart
    settings: Optional[NumericSettings] = None

    def __post_init__(self):
        if self.chart.complex_structure_at is None:
            raise ValueError(f"La carta '{self.chart.nombre}' no define estructura compleja")

    @property
    def ajustes(self) -> NumericSettings:
        return self.settings if self.settings is not None else settings_por_defecto()

    def J_at(self, x) -> np.ndarray:
        x = validar_punto(self.chart, x)
        return np.asarray(self.chart.complex_structure_at(x), dtype=float)

    def covector_action(self, x, omega) -> np.ndarray:
        """ωJ con (ωJ)_j = ω_i J^i_j"""
        return np.asarray(omega, dtype=float) @ self.J_at(x)

    def J_jacobian(self, x) -> np.ndarray:
        """dJ[k, i, j] = ∂_k J^i_j por diferencias centrales."""
        x = validar_punto(self.chart, x)
        s = self.ajustes
        return derivada_central(self.chart.complex_structure_at, self.chart, x, s.fd_step, s.richardson)


def check_almost_complex(ks: KahlerStructure, x) -> float:
    """‖J² + I‖_∞"""
    J = ks.J_at(x)
    return float(np.max(np.abs(J @ J + np.eye(J.shape[0]))))


def check_hermitian(ks: KahlerStructure, x) -> float:
    """‖Jᵀ g J − g‖_∞"""
    J = ks.J_at(x)
    g = metric_checked(ks.chart, x)
    return float(np.max(np.abs(J.T @ g @ J - g)))


def check_hermitian_dual(ks: KahlerStructure, x) -> float:
    """‖J g⁻¹ Jᵀ − g⁻¹‖_∞, forma dual g⁻¹(ωJ, θJ) = g⁻¹(ω, θ)."""
    J = ks.J_at(x)
    g_inv = inverse_metric_at(ks.chart, x)
    return float(np.max(np.abs(J @ g_inv @ J.T - g_inv)))


def nijenhuis_at(ks: KahlerStructure, x, X, Y) -> np.ndarray:
    """
    N_J(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y] evaluado con extensiones
    de coeficientes constantes de X e Y (N_J es tensorial).
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    J = ks.J_at(x)
    dJ = ks.J_jacobian(x)
    JX, JY = J @ X, J @ Y
    # ∂_k (JZ)^i = dJ[k, i, j] Z^j
    d_JX = np.einsum('kij,j->ik', dJ, X)
    d_JY = np.einsum('kij,j->ik', dJ, Y)
    corchete_JX_JY = d_JY @ JX - d_JX @ JY
    corchete_JX_Y = -d_JX @ Y
    corchete_X_JY = d_JY @ X
    return corchete_JX_JY - J @ corchete_JX_Y - J @ corchete_X_JY


def kahler_residual_tensor(ks: KahlerStructure, x) -> np.ndarray:
    """(∇_k J)^i_j = ∂_k J^i_j + Γ^i_kl J^l_j − Γ^l_kj J^i_l"""
    J = ks.J_at(x)
    gamma = christoffel_at(ks.chart, x, ks.ajustes)
    return ks.J_jacobian(x) + np.einsum('ikl,lj->kij', gamma, J) - np.einsum('lkj,il->kij', gamma, J)


def check_kahler(ks: KahlerStructure, x) -> float:
    return float(np.max(np.abs(kahler_residual_tensor(ks, x))))


def fundamental_form_at(ks: KahlerStructure, x, X, Y) -> float:
    """Ω(X,Y) = g(X, JY)"""
    g = metric_checked(ks.chart, x)
    return float(np.asarray(X, dtype=float) @ g @ (ks.J_at(x) @ np.asarray(Y, dtype=float)))


def check_curvature_identities(ks: KahlerStructure, x, Y=None, Z=None, seed: int = 0,
                               riemann: Optional[np.ndarray] = None) -> Tuple[float, float, float]:
    """
    Residuos de las tres identidades de curvatura de una variedad de Kähler:
    R(Y,Z)J = JR(Y,Z),  R(JY,JZ) = R(Y,Z),  R(JY,Z) = −R(Y,JZ).

    Si Y o Z no se indican se eligen aleatoriamente (semilla fija).
    """
    n = ks.chart.dim
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal(n) if Y is None else np.asarray(Y, dtype=float)
    Z = rng.standard_normal(n) if Z is None else np.asarray(Z, dtype=float)
    J = ks.J_at(x)
    R = riemann if riemann is not None else riemann_at(ks.chart, x, ks.ajustes)

    R_YZ = curvature_operator(R, Y, Z)
    conmutacion = np.max(np.abs(R_YZ @ J - J @ R_YZ))
    invariancia = np.max(np.abs(curvature_operator(R, J @ Y, J @ Z) - R_YZ))
    antisimetria = np.max(np.abs(curvature_operator(R, J @ Y, Z) + curvature_operator(R, Y, J @ Z)))
    return float(conmutacion), float(invariancia), float(antisimetria)


def kahler_suite(ks: KahlerStructure, x, seed: int = 0) -> dict:
    """Todas las verificaciones en un punto, como diccionario de residuos."""
    geo = geometry_at(ks.chart, x, ks.ajustes)
    rng = np.random.default_rng(seed)
    X, Y = rng.standard_normal(ks.chart.dim), rng.standard_normal(ks.chart.dim)
    identidades = check_curvature_identities(ks, x, seed=seed, riemann=geo.riemann)
    return {
        "casi_compleja": check_almost_complex(ks, x),
        "hermitica": check_hermitian(ks, x),
        "hermitica_dual": check_hermitian_dual(ks, x),
        "nijenhuis": float(np.max(np.abs(nijenhuis_at(ks, x, X, Y)))),
        "kahler": check_kahler(ks, x),
        "curvatura_conmutacion": identidades[0],
        "curvatura_invariancia_J": identidades[1],
        "curvatura_antisimetria_J": identidades[2],
    }
