"""
R² con g = x² dx² + y² dy² y la estructura compleja J∂x = −(x/y)∂y, J∂y = (y/x)∂x
sobre el cuadrante x > 0, y > 0. Es plana y de Kähler; sus geodésicas y los
levantamientos de la fibra tienen forma cerrada.
"""
from dataclasses import dataclass, asdict
from typing import Dict, Tuple

import numpy as np

from geometria.base_geometry import ManifoldChart

ID = "paper-r2-kahler"
DOMINIO = "x > 0, y > 0"
CAJA_MUESTREO = ((0.5, 0.5), (5.0, 5.0))


def metric_at(x: np.ndarray) -> np.ndarray:
    return np.diag([x[0] ** 2, x[1] ** 2])


def metric_jacobian_at(x: np.ndarray) -> np.ndarray:
    dg = np.zeros((2, 2, 2))
    dg[0, 0, 0] = 2.0 * x[0]
    dg[1, 1, 1] = 2.0 * x[1]
    return dg


def complex_structure_at(x: np.ndarray) -> np.ndarray:
    return np.array([[0.0, x[1] / x[0]],
                     [-x[0] / x[1], 0.0]])


def en_dominio(x: np.ndarray) -> bool:
    return bool(x[0] > 0.0 and x[1] > 0.0)


def construir_carta(analitica: bool = True) -> ManifoldChart:
    """Con `analitica=False` el jacobiano de la métrica se obtiene por diferencias finitas."""
    return ManifoldChart(
        dim=2,
        metric_at=metric_at,
        complex_structure_at=complex_structure_at,
        metric_jacobian_at=metric_jacobian_at if analitica else None,
        chart_domain=en_dominio,
        nombre=ID,
    )


# --- Soluciones cerradas ---

@dataclass(frozen=True)
class ParametrosEjemplo:
    """γ(0) = (a, b), γ'(0) = (α, β); k1, k2 escalan el covector paralelo."""
    a: float = 1.0
    b: float = 1.0
    alpha: float = 1.0
    beta: float = 2.0
    k1: float = 1.0
    k2: float = 1.0

    @classmethod
    def desde_dict(cls, datos: Dict) -> "ParametrosEjemplo":
        return cls(**{k: float(v) for k, v in (datos or {}).items()})

    def como_dict(self) -> Dict[str, float]:
        return asdict(self)


def geodesica(t, prm: ParametrosEjemplo) -> Tuple[np.ndarray, np.ndarray]:
    """x(t) = √(2aαt + a²), y(t) = √(2bβt + b²) y su velocidad."""
    t = np.asarray(t, dtype=float)
    x = np.sqrt(2.0 * prm.a * prm.alpha * t + prm.a ** 2)
    y = np.sqrt(2.0 * prm.b * prm.beta * t + prm.b ** 2)
    posicion = np.stack([x, y], axis=-1)
    velocidad = np.stack([prm.a * prm.alpha / x, prm.b * prm.beta / y], axis=-1)
    return posicion, velocidad


def curva_c1(t, prm: ParametrosEjemplo) -> Tuple[np.ndarray, np.ndarray]:
    """Levantamiento horizontal: ϑ(t) = (k1 x(t), k2 y(t))."""
    posicion, _ = geodesica(t, prm)
    return posicion, posicion * np.array([prm.k1, prm.k2])


def curva_c2(t, prm: ParametrosEjemplo) -> Tuple[np.ndarray, np.ndarray]:
    """ϑ = γ'♭ = (aα x(t), bβ y(t))."""
    posicion, _ = geodesica(t, prm)
    return posicion, posicion * np.array([prm.a * prm.alpha, prm.b * prm.beta])


CURVAS_CERRADAS = {
    "C1": curva_c1,
    "C2": curva_c2,
}


def muestrear_curva(nombre: str, t, prm: ParametrosEjemplo) -> Tuple[np.ndarray, np.ndarray]:
    try:
        return CURVAS_CERRADAS[nombre](t, prm)
    except KeyError:
        raise ValueError(f"Curva cerrada desconocida '{nombre}'. Opciones: {sorted(CURVAS_CERRADAS)}") from None


def estado_inicial(nombre: str, prm: ParametrosEjemplo):
    """(x0, p0, u0, v0) de la curva cerrada en t = 0; v0 = 0 porque ϑ es paralelo."""
    posicion, fibra = muestrear_curva(nombre, np.array([0.0]), prm)
    return posicion[0], fibra[0], np.array([prm.alpha, prm.beta]), np.zeros(2)


DESCRIPTOR_CERRADO = {
    "geodesica": "x(t) = sqrt(2 a alpha t + a^2), y(t) = sqrt(2 b beta t + b^2)",
    "curvas": {
        "C1": "fibra (k1 x(t), k2 y(t)) transportada paralelamente",
        "C2": "fibra (a alpha x(t), b beta y(t)) = flat(gamma')",
    },
    "parametros_por_defecto": ParametrosEjemplo().como_dict(),
}
