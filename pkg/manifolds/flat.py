"""ℂᵐ ≅ R^{2m} euclídeo con la estructura compleja estándar."""
import numpy as np

from geometria.base_geometry import ManifoldChart

ID = "flat-cm"
DOMINIO = "R^{2m}"


def estructura_compleja_estandar(m: int) -> np.ndarray:
    """Bloques [[0, −1], [1, 0]] sobre cada par (x_k, y_k)."""
    J = np.zeros((2 * m, 2 * m))
    for k in range(m):
        J[2 * k, 2 * k + 1] = -1.0
        J[2 * k + 1, 2 * k] = 1.0
    return J


def construir_carta(m: int = 1) -> ManifoldChart:
    n = 2 * int(m)
    J = estructura_compleja_estandar(int(m))
    return ManifoldChart(
        dim=n,
        metric_at=lambda x: np.eye(n),
        complex_structure_at=lambda x: J.copy(),
        metric_jacobian_at=lambda x: np.zeros((n, n, n)),
        nombre=f"{ID}(m={m})",
    )


def caja_muestreo(m: int = 1):
    n = 2 * int(m)
    return (-2.0,) * n, (2.0,) * n
