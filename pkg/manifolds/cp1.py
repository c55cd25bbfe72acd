"""
CP¹ en la carta afín z = x + iy con la métrica de Fubini-Study
g = 4 |dz|² / (1 + |z|²)², curvatura seccional 1.
"""
import numpy as np

from geometria.base_geometry import ManifoldChart

ID = "cp1-fubini-study"
DOMINIO = "R^2 (carta afín de CP^1)"
CAJA_MUESTREO = ((-1.0, -1.0), (1.0, 1.0))
J_ESTANDAR = np.array([[0.0, -1.0], [1.0, 0.0]])


def _factor(x: np.ndarray) -> float:
    return 4.0 / (1.0 + float(x @ x)) ** 2


def metric_at(x: np.ndarray) -> np.ndarray:
    return _factor(x) * np.eye(2)


def metric_jacobian_at(x: np.ndarray) -> np.ndarray:
    rho = float(x @ x)
    return np.stack([(-16.0 * x[k] / (1.0 + rho) ** 3) * np.eye(2) for k in range(2)])


def construir_carta(analitica: bool = True) -> ManifoldChart:
    return ManifoldChart(
        dim=2,
        metric_at=metric_at,
        complex_structure_at=lambda x: J_ESTANDAR.copy(),
        metric_jacobian_at=metric_jacobian_at if analitica else None,
        nombre=ID,
    )
