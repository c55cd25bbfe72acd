"""
Cartas de control negativo.

- control-nonsymmetric: g = e^{ρ/2} I (ρ = x² + y²), Kähler con curvatura
  K = −e^{−ρ/2} no constante: ∇R ≠ 0.
- control-non-kahler: g = diag(1 + ρ, 1) con la J estándar, que no es
  hermítica para g y no es paralela.
"""
import numpy as np

from geometria.base_geometry import ManifoldChart

J_ESTANDAR = np.array([[0.0, -1.0], [1.0, 0.0]])

ID_NO_SIMETRICA = "control-nonsymmetric"
ID_NO_KAHLER = "control-non-kahler"
DOMINIO = "R^2"
CAJA_MUESTREO = ((-1.0, -1.0), (1.0, 1.0))


def _conforme(x: np.ndarray) -> np.ndarray:
    return np.exp(0.5 * float(x @ x)) * np.eye(2)


def _conforme_jacobiano(x: np.ndarray) -> np.ndarray:
    factor = np.exp(0.5 * float(x @ x))
    return np.stack([x[k] * factor * np.eye(2) for k in range(2)])


def carta_no_simetrica() -> ManifoldChart:
    return ManifoldChart(
        dim=2,
        metric_at=_conforme,
        complex_structure_at=lambda x: J_ESTANDAR.copy(),
        metric_jacobian_at=_conforme_jacobiano,
        nombre=ID_NO_SIMETRICA,
    )


def _no_hermitica(x: np.ndarray) -> np.ndarray:
    return np.diag([1.0 + float(x @ x), 1.0])


def _no_hermitica_jacobiano(x: np.ndarray) -> np.ndarray:
    dg = np.zeros((2, 2, 2))
    dg[0, 0, 0] = 2.0 * x[0]
    dg[1, 0, 0] = 2.0 * x[1]
    return dg


def carta_no_kahler() -> ManifoldChart:
    return ManifoldChart(
        dim=2,
        metric_at=_no_hermitica,
        complex_structure_at=lambda x: J_ESTANDAR.copy(),
        metric_jacobian_at=_no_hermitica_jacobiano,
        nombre=ID_NO_KAHLER,
    )
