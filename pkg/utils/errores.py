"""
Jerarquía de excepciones del proyecto.

Todas heredan de GeometriaError para que el CLI pueda distinguir los fallos
del dominio (exit 3) de los errores de configuración (exit 2).
"""
from typing import Any, List, Optional


class GeometriaError(Exception):
    """Base común de todos los errores de geometría y de ejecución de experimentos."""


class SingularMetric(GeometriaError):
    """La factorización de Cholesky de la métrica falló (no es definida positiva o es singular)."""


class OutOfChart(GeometriaError):
    """
    El punto (o el stencil de diferencias finitas) cae fuera del dominio de la carta.

    Cuando la lanza el integrador, `ultimo_estado` y `ultimo_t` guardan el último
    estado válido de la trayectoria.
    """

    def __init__(self, mensaje: str, ultimo_estado: Optional[Any] = None, ultimo_t: Optional[float] = None):
        super().__init__(mensaje)
        self.ultimo_estado = ultimo_estado
        self.ultimo_t = ultimo_t


class GridTooCoarse(GeometriaError):
    """La malla temporal tiene menos muestras de las que exige el stencil."""


class MissingDerivative(GeometriaError):
    """El germen de campo no trae las derivadas necesarias para el caso pedido."""


class NotOnUnitBundle(GeometriaError):
    """El punto no pertenece al fibrado cotangente unitario (|r² - 1| > tolerancia)."""


class NonTangentialArgument(GeometriaError):
    """La parte de fibra del argumento no es ortogonal a p."""


class StepUnderflow(GeometriaError):
    """El controlador adaptativo redujo el paso por debajo de min_step."""

    def __init__(self, mensaje: str, ultimo_estado: Optional[Any] = None, ultimo_t: Optional[float] = None):
        super().__init__(mensaje)
        self.ultimo_estado = ultimo_estado
        self.ultimo_t = ultimo_t


class DegenerateSpeed(GeometriaError):
    """La curva proyectada tiene rapidez nula (1 - K demasiado pequeño)."""


class UnknownManifold(GeometriaError):
    """El id solicitado no existe en el registro de variedades."""


class RegistrationError(GeometriaError):
    """Las banderas declaradas de una variedad no superan las verificaciones de registro."""


class ConfigInvalid(GeometriaError):
    """
    Configuración de experimento inválida.

    Args:
        errores (List[str]): Mensajes por campo, con el formato 'campo: motivo'.
    """

    def __init__(self, errores: List[str]):
        self.errores = list(errores)
        super().__init__("Configuración inválida:\n  - " + "\n  - ".join(self.errores))

    def __reduce__(self):
        # ProcessPoolExecutor reconstruye la excepción en el proceso padre.
        return (ConfigInvalid, (self.errores,))
