"""
Integradores Runge-Kutta explícitos definidos por tabla de Butcher.

RK4 clásico (paso fijo), Runge-Kutta-Fehlberg 4(5) y Dormand-Prince 5(4)
(paso adaptativo), con salida densa por interpolación cúbica de Hermite.
"""
import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from utils import config
from utils.errores import OutOfChart, StepUnderflow
from utils.logger import setup_logger

logger = setup_logger(name='integradores', console_level=logging.WARNING, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

FuncionRHS = Callable[[float, np.ndarray], np.ndarray]
PostPaso = Callable[[float, np.ndarray], np.ndarray]


class ExplicitRungeKutta:
    """Base de los métodos: `s` etapas, nodos `eval_stages`, filas `BT`, pesos `B` y, si es adaptativo, `TR`."""

    nombre = "rk"

    def __init__(self):
        self.s = 0
        self.n = 0
        self.is_adaptive = False
        self.eval_stages: Sequence[float] = []
        self.BT: Dict[int, Sequence[float]] = {}
        self.B: Sequence[float] = []
        self.TR: Optional[Sequence[float]] = None

    def paso(self, f: FuncionRHS, t: float, y: np.ndarray, h: float, k0: Optional[np.ndarray] = None):
        """
        Un paso de tamaño h.

        Returns:
            tuple: (y_nuevo, estimación del error local o None).
        """
        k = [f(t, y) if k0 is None else k0]
        for i in range(1, self.s):
            incremento = sum(a * k[j] for j, a in enumerate(self.BT[i - 1]) if a != 0.0)
            k.append(f(t + self.eval_stages[i] * h, y + h * incremento))
        y_nuevo = y + h * sum(b * k[j] for j, b in enumerate(self.B) if b != 0.0)
        if self.TR is None:
            return y_nuevo, None
        error = h * sum(e * k[j] for j, e in enumerate(self.TR) if e != 0.0)
        return y_nuevo, error


class RK4(ExplicitRungeKutta):
    """Runge-Kutta clásico de 4º orden, paso fijo."""

    nombre = "rk4"

    def __init__(self):
        super().__init__()
        self.s = 4
        self.n = 4
        self.eval_stages = [0.0, 1/2, 1/2, 1.0]
        self.BT = {
            0: [1/2],
            1: [0.0, 1/2],
            2: [0.0, 0.0, 1.0],
        }
        self.B = [1/6, 1/3, 1/3, 1/6]


class RKF45(ExplicitRungeKutta):
    """Par de Fehlberg 4(5): propaga la solución de orden 4."""

    nombre = "rkf45"

    def __init__(self):
        super().__init__()
        self.s = 6
        self.n = 4
        self.is_adaptive = True
        self.eval_stages = [0.0, 1/4, 3/8, 12/13, 1.0, 1/2]
        self.BT = {
            0: [      1/4],
            1: [     3/32,       9/32],
            2: [1932/2197, -7200/2197,  7296/2197],
            3: [  439/216,       -8.0,   3680/513, -845/4104],
            4: [    -8/27,        2.0, -3544/2565, 1859/4104, -11/40],
        }
        self.B = [25/216, 0.0, 1408/2565, 2197/4104, -1/5, 0.0]
        self.TR = [-1/360, 0.0, 128/4275, 2197/75240, -1/50, -2/55]


class RKDP54(ExplicitRungeKutta):
    """Dormand-Prince 5(4): propaga la solución de orden 5."""

    nombre = "rk45"

    def __init__(self):
        super().__init__()
        self.s = 7
        self.n = 5
        self.is_adaptive = True
        self.eval_stages = [0.0, 1/5, 3/10, 4/5, 8/9, 1.0, 1.0]
        self.BT = {
            0: [      1/5],
            1: [     3/40,        9/40],
            2: [    44/45,      -56/15,       32/9],
            3: [19372/6561, -25360/2187, 64448/6561, -212/729],
            4: [ 9017/3168,     -355/33, 46732/5247,   49/176, -5103/18656],
            5: [    35/384,         0.0,   500/1113,  125/192,  -2187/6784, 11/84],
        }
        self.B = [35/384, 0.0, 500/1113, 125/192, -2187/6784, 11/84, 0.0]
        self.TR = [71/57600, 0.0, -71/16695, 71/1920, -17253/339200, 22/525, -1/40]


METODOS = {
    "rk4": RK4,
    "rkf45": RKF45,
    "rk45": RKDP54,
}


def obtener_metodo(nombre: str) -> ExplicitRungeKutta:
    try:
        return METODOS[nombre]()
    except KeyError:
        raise ValueError(f"Integrador desconocido '{nombre}'. Opciones: {sorted(METODOS)}") from None


@dataclass
class ResultadoIntegracion:
    t: np.ndarray
    y: np.ndarray
    metodo: str
    pasos_aceptados: int
    pasos_rechazados: int
    renormalizaciones: int


def _hermite(t0: float, y0: np.ndarray, f0: np.ndarray, t1: float, y1: np.ndarray, f1: np.ndarray,
             t: float) -> np.ndarray:
    h = t1 - t0
    s = (t - t0) / h
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0
            + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1)


def _norma_error(error: np.ndarray, y: np.ndarray, y_nuevo: np.ndarray, atol: float, rtol: float) -> float:
    escala = atol + rtol * np.maximum(np.abs(y), np.abs(y_nuevo))
    return float(np.sqrt(np.mean((error / escala) ** 2)))


def integrar(f: FuncionRHS, y0, t_span, metodo: str = "rk4", h: Optional[float] = None,
             t_muestras=None, atol: float = 1e-10, rtol: float = 1e-10, min_step: float = 1e-12,
             post_paso: Optional[PostPaso] = None, max_pasos: int = 5_000_000) -> ResultadoIntegracion:
    """
    Integra y' = f(t, y) sobre t_span = (t0, t1).

    Args:
        f: lado derecho.
        y0: estado inicial.
        t_span: intervalo (t0, t1) con t1 > t0.
        metodo: 'rk4' (paso fijo h), 'rkf45' o 'rk45' (Dormand-Prince, adaptativos).
        h: paso fijo, o paso inicial de los adaptativos.
        t_muestras: tiempos de salida; si es None se devuelven todos los pasos aceptados.
        post_paso: transforma el estado tras cada paso aceptado (p. ej. renormalización).

    Raises:
        StepUnderflow: si el paso adaptativo cae por debajo de min_step.
        OutOfChart: si una evaluación sale de la carta; lleva el último estado válido.
    """
    integrador = obtener_metodo(metodo)
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError(f"Intervalo de integración inválido: {t_span}")
    y = np.asarray(y0, dtype=float).copy()
    if h is None:
        h = (t1 - t0) / 100.0
    h = float(h)
    if h <= 0:
        raise ValueError(f"El paso debe ser positivo, se recibió {h}")

    muestras = None if t_muestras is None else np.asarray(t_muestras, dtype=float)
    t_salida, y_salida = [], []
    indice_muestra = 0

    def registrar(t_a, y_a, f_a, t_b, y_b, f_b):
        nonlocal indice_muestra
        if muestras is None:
            t_salida.append(t_b)
            y_salida.append(y_b.copy())
            return
        tolerancia = 1e-12 * max(1.0, abs(t_b))
        while indice_muestra < muestras.shape[0] and muestras[indice_muestra] <= t_b + tolerancia:
            ts = muestras[indice_muestra]
            if abs(ts - t_b) <= tolerancia:
                valor = y_b.copy()
            elif abs(ts - t_a) <= tolerancia:
                valor = y_a.copy()
            else:
                valor = _hermite(t_a, y_a, f_a, t_b, y_b, f_b, ts)
            t_salida.append(float(ts))
            y_salida.append(valor)
            indice_muestra += 1

    inicio = time.time()
    t = t0
    aceptados = rechazados = renormalizaciones = 0
    try:
        f_actual = f(t, y)
    except OutOfChart as e:
        raise OutOfChart(str(e), ultimo_estado=y.copy(), ultimo_t=t) from e

    if muestras is None:
        t_salida.append(t)
        y_salida.append(y.copy())
    else:
        registrar(t, y, f_actual, t, y, f_actual)

    paso_fijo = h
    while t < t1 - 1e-14 * max(1.0, abs(t1)):
        if aceptados + rechazados >= max_pasos:
            raise StepUnderflow(f"Se superó el máximo de {max_pasos} pasos en t={t:.6g}",
                                ultimo_estado=y.copy(), ultimo_t=t)
        if integrador.is_adaptive:
            h_actual = min(h, t1 - t)
        else:
            # t_k = t0 + k·h evita acumular error de redondeo; el último paso se acorta
            t_objetivo = min(t0 + (aceptados + 1) * paso_fijo, t1)
            if t1 - t_objetivo < 1e-12 * max(1.0, abs(t1)):
                t_objetivo = t1
            h_actual = t_objetivo - t
        try:
            y_nuevo, error = integrador.paso(f, t, y, h_actual, k0=f_actual)
        except OutOfChart as e:
            logger.error(f"\n❌ La trayectoria salió de la carta en t={t:.6g}: {e}")
            raise OutOfChart(str(e), ultimo_estado=y.copy(), ultimo_t=t) from e

        if error is not None:
            norma = _norma_error(error, y, y_nuevo, atol, rtol)
            factor = 5.0 if norma == 0.0 else min(5.0, max(0.2, 0.9 * norma ** (-1.0 / 5.0)))
            if norma > 1.0:
                rechazados += 1
                h = h_actual * factor
                if h < min_step:
                    logger.error(f"\n❌ Paso adaptativo {h:.3e} menor que el mínimo {min_step:.1e} en t={t:.6g}")
                    raise StepUnderflow(f"Paso {h:.3e} < min_step {min_step:.1e} en t={t:.6g}",
                                        ultimo_estado=y.copy(), ultimo_t=t)
                continue
            h = h_actual * factor if h_actual >= h * (1 - 1e-12) else max(h, h_actual * factor)

        t_nuevo = t1 if abs(t1 - (t + h_actual)) <= 1e-12 * max(1.0, abs(t1)) else t + h_actual
        if post_paso is not None:
            y_nuevo = post_paso(t_nuevo, y_nuevo)
            renormalizaciones += 1
        try:
            f_nuevo = f(t_nuevo, y_nuevo)
        except OutOfChart as e:
            raise OutOfChart(str(e), ultimo_estado=y.copy(), ultimo_t=t) from e

        registrar(t, y, f_actual, t_nuevo, y_nuevo, f_nuevo)
        t, y, f_actual = t_nuevo, y_nuevo, f_nuevo
        aceptados += 1

    logger.debug(f"\nPERFORMANCE: {integrador.nombre} en [{t0}, {t1}]: {aceptados} pasos aceptados, "
                 f"{rechazados} rechazados, {time.time() - inicio:.3f} s")
    return ResultadoIntegracion(
        t=np.asarray(t_salida, dtype=float),
        y=np.asarray(y_salida, dtype=float),
        metodo=integrador.nombre,
        pasos_aceptados=aceptados,
        pasos_rechazados=rechazados,
        renormalizaciones=renormalizaciones,
    )

