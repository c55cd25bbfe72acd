"""
Métrica de Sasaki deformada tipo Berger sobre T*M y su conexión de Levi-Civita.

Un vector tangente a T*M en (x, p) se escribe ᴴX + ⱽω (LiftedVector). Los campos
que se derivan se pasan como gérmenes de primer orden (CampoGerm): valor y
jacobiano en x del campo vectorial X y del campo covectorial ω de la base.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from geometria.base_geometry import (
    GeometryCache, ManifoldChart, covariant_derivative_covector, covariant_derivative_vector,
    curvature_operator, geometry_at,
)
from geometria.kahler_structure import KahlerStructure
from utils import config
from utils.config import NumericSettings, settings_por_defecto
from utils.errores import MissingDerivative, NonTangentialArgument, NotOnUnitBundle
from utils.logger import setup_logger

logger = setup_logger(name='berger_sasaki', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)


@dataclass(frozen=True)
class BergerSasakiConfig:
    """δ de la deformación junto con la carta y su estructura de Kähler."""
    delta: float
    chart: ManifoldChart
    kahler: KahlerStructure
    settings: NumericSettings = field(default_factory=settings_por_defecto)

    @classmethod
    def desde_carta(cls, chart: ManifoldChart, delta: float,
                    settings: Optional[NumericSettings] = None) -> "BergerSasakiConfig":
        s = settings if settings is not None else settings_por_defecto()
        return cls(delta=float(delta), chart=chart, kahler=KahlerStructure(chart, s), settings=s)

    @property
    def delta2(self) -> float:
        return self.delta * self.delta


@dataclass(frozen=True)
class CotangentPoint:
    """Punto (x, p) de T*M con r² = g⁻¹(p,p) y λ = 1 + δ²r²."""
    x: np.ndarray
    p: np.ndarray
    r2: float
    lam: float
    geo: GeometryCache = field(repr=False, compare=False)
    J: np.ndarray = field(repr=False, compare=False)

    @property
    def pJ(self) -> np.ndarray:
        return self.p @ self.J


def cotangent_point(cfg: BergerSasakiConfig, x, p) -> CotangentPoint:
    geo = geometry_at(cfg.chart, x, cfg.settings)
    p = np.asarray(p, dtype=float)
    r2 = float(p @ geo.g_inv @ p)
    return CotangentPoint(x=geo.point, p=p, r2=r2, lam=1.0 + cfg.delta2 * r2, geo=geo,
                          J=cfg.kahler.J_at(geo.point))


@dataclass(frozen=True)
class LiftedVector:
    """ᴴX + ⱽω en el punto `at`."""
    horizontal: np.ndarray
    vertical: np.ndarray
    at: CotangentPoint = field(repr=False, compare=False)

    def __add__(self, otro: "LiftedVector") -> "LiftedVector":
        return LiftedVector(self.horizontal + otro.horizontal, self.vertical + otro.vertical, self.at)

    def __sub__(self, otro: "LiftedVector") -> "LiftedVector":
        return LiftedVector(self.horizontal - otro.horizontal, self.vertical - otro.vertical, self.at)

    def __mul__(self, escalar: float) -> "LiftedVector":
        return LiftedVector(escalar * self.horizontal, escalar * self.vertical, self.at)

    __rmul__ = __mul__

    def como_arreglo(self) -> np.ndarray:
        return np.concatenate([self.horizontal, self.vertical])


def lifted(cp: CotangentPoint, X=None, omega=None) -> LiftedVector:
    n = cp.x.shape[0]
    X = np.zeros(n) if X is None else np.asarray(X, dtype=float)
    omega = np.zeros(n) if omega is None else np.asarray(omega, dtype=float)
    return LiftedVector(X, omega, cp)


@dataclass(frozen=True)
class CampoGerm:
    """
    Germen de primer orden del campo ᴴX + ⱽω (o ᴴX + ᵀω si `tangencial`).

    Args:
        X: valor del campo vectorial de la base en x.
        omega: valor del campo covectorial de la base en x.
        DX: DX[k, i] = ∂_i X^k (None si no se conoce).
        Domega: Domega[h, i] = ∂_i ω_h (None si no se conoce).
        tangencial: interpreta la parte vertical como el levantamiento tangencial
            ⱽω − g⁻¹(ω,p)ⱽp, campo que depende de p.
        liouville: coeficiente constante c del sumando c·ⱽp.
    """
    X: np.ndarray
    omega: np.ndarray
    DX: Optional[np.ndarray] = None
    Domega: Optional[np.ndarray] = None
    tangencial: bool = False
    liouville: float = 0.0

    @classmethod
    def constante(cls, X, omega, tangencial: bool = False) -> "CampoGerm":
        X = np.asarray(X, dtype=float)
        omega = np.asarray(omega, dtype=float)
        n = X.shape[0]
        return cls(X, omega, np.zeros((n, n)), np.zeros((n, n)), tangencial)

    def campo_X(self, x0: np.ndarray, y: np.ndarray) -> np.ndarray:
        DX = self.DX if self.DX is not None else np.zeros((x0.shape[0], x0.shape[0]))
        return self.X + DX @ (y - x0)

    def campo_omega(self, x0: np.ndarray, y: np.ndarray) -> np.ndarray:
        Dw = self.Domega if self.Domega is not None else np.zeros((x0.shape[0], x0.shape[0]))
        return self.omega + Dw @ (y - x0)


# --- Productos auxiliares ---

def _g_inv(cp: CotangentPoint, omega, theta) -> float:
    return float(np.asarray(omega) @ cp.geo.g_inv @ np.asarray(theta))


def _A(cp: CotangentPoint, omega) -> float:
    """g⁻¹(ω, pJ)"""
    return _g_inv(cp, omega, cp.pJ)


def _R(cp: CotangentPoint) -> np.ndarray:
    return cp.geo.riemann


def _es_cero(v: np.ndarray) -> bool:
    return not np.any(v)


def pR(cp: CotangentPoint, X, Y) -> np.ndarray:
    """pR(X,Y) = p_a R^a_ijk X^i Y^j dx^k"""
    return np.einsum('a,aijk,i,j->k', cp.p, _R(cp), X, Y)


# --- Operaciones ---

def horizontal_lift_coords(cfg: BergerSasakiConfig, cp: CotangentPoint, X) -> np.ndarray:
    """Coordenadas (X^i, p_h Γ^h_ij X^j) de ᴴX en el marco {∂_i, ∂_ī}."""
    X = np.asarray(X, dtype=float)
    return np.concatenate([X, conexion_no_lineal(cp) @ X])


def conexion_no_lineal(cp: CotangentPoint) -> np.ndarray:
    """N[i, j] = p_h Γ^h_ij"""
    return np.einsum('h,hij->ij', cp.p, cp.geo.gamma)


def lifted_to_coords(cfg: BergerSasakiConfig, V: LiftedVector) -> np.ndarray:
    return np.concatenate([V.horizontal, V.vertical + conexion_no_lineal(V.at) @ V.horizontal])


def coords_to_lifted(cfg: BergerSasakiConfig, cp: CotangentPoint, z) -> LiftedVector:
    z = np.asarray(z, dtype=float)
    n = cp.x.shape[0]
    X = z[:n]
    return LiftedVector(X, z[n:] - conexion_no_lineal(cp) @ X, cp)


def bs_metric(cfg: BergerSasakiConfig, cp: CotangentPoint, U: LiftedVector, V: LiftedVector) -> float:
    """
    ᴮˢg(ᴴX+ⱽω, ᴴY+ⱽθ) = g(X,Y) + g⁻¹(ω,θ) + δ² g⁻¹(ω,pJ) g⁻¹(θ,pJ)
    """
    horizontal = float(U.horizontal @ cp.geo.g @ V.horizontal)
    vertical = _g_inv(cp, U.vertical, V.vertical)
    return horizontal + vertical + cfg.delta2 * _A(cp, U.vertical) * _A(cp, V.vertical)


def normal_field(cfg: BergerSasakiConfig, cp: CotangentPoint) -> LiftedVector:
    """Campo de Liouville ⱽp, normal unitario de T*₁M."""
    return lifted(cp, omega=cp.p)


def verificar_fibrado_unitario(cfg: BergerSasakiConfig, cp: CotangentPoint) -> None:
    if abs(cp.r2 - 1.0) > cfg.settings.unit_tolerance:
        raise NotOnUnitBundle(f"|r² − 1| = {abs(cp.r2 - 1.0):.3e} supera la tolerancia {cfg.settings.unit_tolerance:.1e}")


def _proyeccion_tangencial(cp: CotangentPoint, omega) -> np.ndarray:
    """ω̄ = ω − g⁻¹(ω,p) p"""
    omega = np.asarray(omega, dtype=float)
    return omega - _g_inv(cp, omega, cp.p) * cp.p


def tangential_lift(cfg: BergerSasakiConfig, cp: CotangentPoint, omega) -> LiftedVector:
    """ᵀω = ⱽω − g⁻¹(ω,p)ⱽp"""
    verificar_fibrado_unitario(cfg, cp)
    return lifted(cp, omega=_proyeccion_tangencial(cp, omega))


def calR(cfg: BergerSasakiConfig, cp: CotangentPoint, vprime, theta) -> np.ndarray:
    """
    ℛ(ϑ̃′, ϑ̃) = R(ϑ̃′, ϑ̃) + δ² g⁻¹(ϑ′, ϑJ) R(ϑ̃, Jϑ̃) como matriz (1,1) en x.
    """
    vprime = np.asarray(vprime, dtype=float)
    theta = np.asarray(theta, dtype=float)
    R = _R(cp)
    g_inv = cp.geo.g_inv
    v_sharp, t_sharp = g_inv @ vprime, g_inv @ theta
    mu = float(vprime @ g_inv @ (theta @ cp.J))
    return curvature_operator(R, v_sharp, t_sharp) + cfg.delta2 * mu * curvature_operator(R, t_sharp, cp.J @ t_sharp)


def _termino_curvatura_horizontal(cfg: BergerSasakiConfig, cp: CotangentPoint, theta, X) -> np.ndarray:
    """½[R(p̃,θ̃)X − δ² g⁻¹(θ,pJ) R(p̃,Jp̃)X]"""
    R = _R(cp)
    p_sharp = cp.geo.g_inv @ cp.p
    theta_sharp = cp.geo.g_inv @ theta
    return 0.5 * (curvature_operator(R, p_sharp, theta_sharp) @ X
                  - cfg.delta2 * _A(cp, theta) * (curvature_operator(R, p_sharp, cp.J @ p_sharp) @ X))


def _vertical_vertical(cfg: BergerSasakiConfig, cp: CotangentPoint, omega, theta) -> np.ndarray:
    """Caso (iv): covector de ᴮˢ∇_{ⱽω}ⱽθ."""
    J, pJ = cp.J, cp.pJ
    A_w, A_t = _A(cp, omega), _A(cp, theta)
    return (cfg.delta2 * (A_w * (theta @ J) + A_t * (omega @ J))
            - (cfg.delta2 ** 2 / cp.lam) * (A_w * _g_inv(cp, theta, cp.p) + _g_inv(cp, omega, cp.p) * A_t) * pJ)


def _valor_vertical(cp: CotangentPoint, germ: CampoGerm) -> np.ndarray:
    """Parte vertical efectiva en el punto (ω̄ si el germen es tangencial, más c·p)."""
    base = _proyeccion_tangencial(cp, germ.omega) if germ.tangencial else np.asarray(germ.omega, dtype=float)
    return base + germ.liouville * cp.p


def bs_connection(cfg: BergerSasakiConfig, cp: CotangentPoint, U: CampoGerm, V: CampoGerm) -> LiftedVector:
    """
    ᴮˢ∇_U V para campos levantados dados por gérmenes.

    Suma los cuatro casos:
      (i)   ᴮˢ∇_{ᴴX}ᴴY = ᴴ(∇_X Y) + ½ⱽ(pR(X,Y))
      (ii)  ᴮˢ∇_{ᴴX}ⱽθ = ⱽ(∇_X θ) + ½[ᴴ(R(p̃,θ̃)X) − δ²g⁻¹(θ,pJ)ᴴ(R(p̃,Jp̃)X)]
      (iii) ᴮˢ∇_{ⱽω}ᴴY = ½[ᴴ(R(p̃,ω̃)Y) − δ²g⁻¹(ω,pJ)ᴴ(R(p̃,Jp̃)Y)]
      (iv)  ᴮˢ∇_{ⱽω}ⱽθ = δ²[g⁻¹(ω,pJ)ⱽ(θJ) + g⁻¹(θ,pJ)ⱽ(ωJ)]
                         − (δ⁴/λ)[g⁻¹(ω,pJ)g⁻¹(θ,p) + g⁻¹(ω,p)g⁻¹(θ,pJ)]ⱽ(pJ)
    Si V es tangencial (ᴴY + ⱽθ − g⁻¹(θ,p)ⱽp) se añaden los términos del campo de
    Liouville: −U(g⁻¹(θ,p))ⱽp − g⁻¹(θ,p)ᴮˢ∇_U ⱽp; un sumando c·ⱽp aporta c·ᴮˢ∇_U ⱽp.

    Raises:
        MissingDerivative: Si U tiene parte horizontal y V tiene un valor no nulo sin el jacobiano correspondiente.
    """
    gamma = cp.geo.gamma
    X = np.asarray(U.X, dtype=float)
    alpha = _valor_vertical(cp, U)
    Y = np.asarray(V.X, dtype=float)
    theta = np.asarray(V.omega, dtype=float)
    n = X.shape[0]

    horizontal = np.zeros(n)
    vertical = np.zeros(n)
    hay_horizontal = not _es_cero(X)

    # (i) y (ii): ∇_X Y y ∇_X θ dependen del germen de V, no solo de su valor en x
    nabla_X_theta = np.zeros(n)
    if hay_horizontal:
        if V.DX is not None:
            horizontal += covariant_derivative_vector(gamma, X, Y, V.DX)
        elif not _es_cero(Y):
            raise MissingDerivative("El caso (i) requiere el jacobiano DX del campo V")
        vertical += 0.5 * pR(cp, X, Y)
        if V.Domega is not None:
            nabla_X_theta = covariant_derivative_covector(gamma, X, theta, V.Domega)
            vertical += nabla_X_theta
        elif not _es_cero(theta):
            raise MissingDerivative("El caso (ii) requiere el jacobiano Domega del campo V")
        horizontal += _termino_curvatura_horizontal(cfg, cp, theta, X)

    # (iii)
    if not _es_cero(alpha) and not _es_cero(Y):
        horizontal += _termino_curvatura_horizontal(cfg, cp, alpha, Y)

    # (iv)
    if not _es_cero(alpha) and not _es_cero(theta):
        vertical += _vertical_vertical(cfg, cp, alpha, theta)

    # ᴮˢ∇_U ⱽp = ⱽα + (δ²/λ) g⁻¹(α,pJ) ⱽ(pJ)   (ᴮˢ∇_{ᴴX}ⱽp = 0)
    nabla_U_liouville = alpha + (cfg.delta2 / cp.lam) * _A(cp, alpha) * cp.pJ
    if V.liouville:
        vertical += V.liouville * nabla_U_liouville

    if V.tangencial:
        s = _g_inv(cp, theta, cp.p)
        # U(g⁻¹(θ,p)) = g⁻¹(∇_X θ, p) + g⁻¹(θ, α)
        derivada_s = _g_inv(cp, nabla_X_theta, cp.p) + _g_inv(cp, theta, alpha)
        vertical += -derivada_s * cp.p - s * nabla_U_liouville

    return LiftedVector(horizontal, vertical, cp)


def unit_bundle_connection(cfg: BergerSasakiConfig, cp: CotangentPoint, U: CampoGerm, V: CampoGerm) -> LiftedVector:
    """
    Conexión inducida en T*₁M para campos ᴴX + ᵀω y ᴴY + ᵀθ:
      ∇̂_{ᴴX}ᴴY = ᴴ(∇_X Y) + ½ᵀ(pR(X,Y))
      ∇̂_{ᴴX}ᵀθ = ᵀ(∇_X θ) + ½[ᴴ(R(p̃,θ̃)X) − δ²g⁻¹(θ,pJ)ᴴ(R(p̃,Jp̃)X)]
      ∇̂_{ᵀω}ᴴY = ½[ᴴ(R(p̃,ω̃)Y) − δ²g⁻¹(ω,pJ)ᴴ(R(p̃,Jp̃)Y)]
      ∇̂_{ᵀω}ᵀθ = −g⁻¹(θ,p)ᵀω + δ²[g⁻¹(ω,pJ)ᵀ(θJ) + g⁻¹(θ,pJ)ᵀ(ωJ)]
                  − δ²[g⁻¹(ω,pJ)g⁻¹(θ,p) + g⁻¹(ω,p)g⁻¹(θ,pJ)]ᵀ(pJ)

    Raises:
        NotOnUnitBundle: Si |r² − 1| supera la tolerancia.
        NonTangentialArgument: Si la parte de fibra de U o V no es ortogonal a p.
        MissingDerivative: Como en bs_connection.
    """
    verificar_fibrado_unitario(cfg, cp)
    tol = cfg.settings.unit_tolerance
    for nombre, germ in (("U", U), ("V", V)):
        escala = max(1.0, float(np.linalg.norm(germ.omega)))
        if abs(_g_inv(cp, germ.omega, cp.p)) > tol * escala:
            raise NonTangentialArgument(f"La parte de fibra de {nombre} no es ortogonal a p: "
                                        f"g⁻¹(ω,p) = {_g_inv(cp, germ.omega, cp.p):.3e}")

    T = lambda xi: _proyeccion_tangencial(cp, xi)
    gamma = cp.geo.gamma
    J = cp.J
    X, omega = np.asarray(U.X, dtype=float), np.asarray(U.omega, dtype=float)
    Y, theta = np.asarray(V.X, dtype=float), np.asarray(V.omega, dtype=float)
    n = X.shape[0]
    horizontal = np.zeros(n)
    vertical = np.zeros(n)

    if not _es_cero(X):
        if V.DX is not None:
            horizontal += covariant_derivative_vector(gamma, X, Y, V.DX)
        elif not _es_cero(Y):
            raise MissingDerivative("El caso ᴴᴴ requiere el jacobiano DX del campo V")
        vertical += 0.5 * T(pR(cp, X, Y))
        if V.Domega is not None:
            vertical += T(covariant_derivative_covector(gamma, X, theta, V.Domega))
        elif not _es_cero(theta):
            raise MissingDerivative("El caso ᴴᵀ requiere el jacobiano Domega del campo V")
        horizontal += _termino_curvatura_horizontal(cfg, cp, theta, X)

    if not _es_cero(omega) and not _es_cero(Y):
        horizontal += _termino_curvatura_horizontal(cfg, cp, omega, Y)

    if not _es_cero(omega) and not _es_cero(theta):
        A_w, A_t = _A(cp, omega), _A(cp, theta)
        s_w, s_t = _g_inv(cp, omega, cp.p), _g_inv(cp, theta, cp.p)
        vertical += (-s_t * T(omega)
                     + cfg.delta2 * (A_w * T(theta @ J) + A_t * T(omega @ J))
                     - cfg.delta2 * (A_w * s_t + s_w * A_t) * T(cp.pJ))

    return LiftedVector(horizontal, vertical, cp)


def gauss_projection(cfg: BergerSasakiConfig, cp: CotangentPoint, W: LiftedVector) -> LiftedVector:
    """W − ᴮˢg(W, 𝒩)𝒩 / ᴮˢg(𝒩, 𝒩), con 𝒩 = ⱽp."""
    N = normal_field(cfg, cp)
    return W - N * (bs_metric(cfg, cp, W, N) / bs_metric(cfg, cp, N, N))


def liouville_connection(cfg: BergerSasakiConfig, cp: CotangentPoint, X, omega) -> Dict[str, LiftedVector]:
    """
    Las cinco derivadas que involucran al campo de Liouville ⱽp:
      ∇_{ᴴX}ⱽp = 0,  ∇_{ⱽp}ᴴX = 0,  ∇_{ⱽω}ⱽp = ⱽω + (δ²/λ)g⁻¹(ω,pJ)ⱽ(pJ),
      ∇_{ⱽp}ⱽω = (δ²/λ)g⁻¹(ω,pJ)ⱽ(pJ),  ∇_{ⱽp}ⱽp = ⱽp
    """
    omega = np.asarray(omega, dtype=float)
    factor = (cfg.delta2 / cp.lam) * _A(cp, omega)
    return {
        "H_X__V_p": lifted(cp),
        "V_p__H_X": lifted(cp),
        "V_omega__V_p": lifted(cp, omega=omega + factor * cp.pJ),
        "V_p__V_omega": lifted(cp, omega=factor * cp.pJ),
        "V_p__V_p": lifted(cp, omega=cp.p),
    }


def lift_bracket(cfg: BergerSasakiConfig, cp: CotangentPoint, U: CampoGerm, V: CampoGerm) -> LiftedVector:
    """
    Corchete de Lie de dos campos levantados (no tangenciales):
      [ⱽω,ⱽθ] = 0,  [ᴴX,ⱽθ] = ⱽ(∇_X θ),  [ᴴX,ᴴY] = ᴴ[X,Y] + ⱽ(pR(X,Y))

    Raises:
        MissingDerivative: Si falta algún jacobiano.
    """
    if U.tangencial or V.tangencial:
        raise ValueError("lift_bracket solo admite levantamientos horizontales/verticales")
    for germ in (U, V):
        if germ.DX is None or germ.Domega is None:
            raise MissingDerivative("El corchete requiere los jacobianos de ambos campos")
    gamma = cp.geo.gamma
    X, omega = np.asarray(U.X, dtype=float), np.asarray(U.omega, dtype=float)
    Y, theta = np.asarray(V.X, dtype=float), np.asarray(V.omega, dtype=float)
    corchete_base = V.DX @ X - U.DX @ Y
    vertical = (pR(cp, X, Y)
                + covariant_derivative_covector(gamma, X, theta, V.Domega)
                - covariant_derivative_covector(gamma, Y, omega, U.Domega))
    return LiftedVector(corchete_base, vertical, cp)


def vertical_derivative_bs_metric(cfg: BergerSasakiConfig, cp: CotangentPoint, eta, omega, theta) -> float:
    """ⱽη ᴮˢg(ⱽω,ⱽθ) = δ²g⁻¹(ω,ηJ)g⁻¹(θ,pJ) + δ²g⁻¹(ω,pJ)g⁻¹(θ,ηJ)"""
    eta_J = np.asarray(eta, dtype=float) @ cp.J
    return cfg.delta2 * (_g_inv(cp, omega, eta_J) * _A(cp, theta) + _A(cp, omega) * _g_inv(cp, theta, eta_J))
