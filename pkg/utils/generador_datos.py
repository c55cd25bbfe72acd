import numpy as np

from geometria.berger_sasaki import CampoGerm
from geometria.base_geometry import inverse_metric_at


class GeneradorConfiguraciones:
    """
    Genera configuraciones aleatorias reproducibles (semilla fija) para las
    comparaciones con el oráculo y los datos iniciales de geodésicas: puntos
    dentro de la caja de muestreo de una variedad, covectores y gérmenes de campos.
    """

    def __init__(self, entrada, seed: int = 0):
        self.entrada = entrada
        self.carta = entrada.carta()
        self.rng = np.random.default_rng(seed)

    @property
    def n(self) -> int:
        return self.carta.dim

    # --- Datos básicos ---

    def punto(self) -> np.ndarray:
        """Punto uniforme en la caja de muestreo, alejado un 10% de los bordes."""
        bajo, alto = (np.asarray(c, dtype=float) for c in self.entrada.caja_muestreo)
        margen = 0.1 * (alto - bajo)
        return self.rng.uniform(bajo + margen, alto - margen)

    def covector(self, escala: float = 1.0) -> np.ndarray:
        return escala * self.rng.standard_normal(self.n)

    def covector_unitario(self, x) -> np.ndarray:
        p = self.rng.standard_normal(self.n)
        g_inv = inverse_metric_at(self.carta, x)
        return p / np.sqrt(float(p @ g_inv @ p))

    def germen(self, tangencial: bool = False, x=None, p=None) -> CampoGerm:
        """
        Germen con valores y jacobianos normales estándar. Si es tangencial, el
        valor de ω se proyecta ortogonalmente a p en x.
        """
        n = self.n
        omega = self.rng.standard_normal(n)
        if tangencial:
            g_inv = inverse_metric_at(self.carta, x)
            omega = omega - float(omega @ g_inv @ p) / float(p @ g_inv @ p) * p
        return CampoGerm(
            X=self.rng.standard_normal(n),
            omega=omega,
            DX=self.rng.standard_normal((n, n)),
            Domega=self.rng.standard_normal((n, n)),
            tangencial=tangencial,
        )

    # --- Configuraciones compuestas ---

    def configuracion_oraculo(self) -> dict:
        """x, p, U, V para la conexión total y p_unit, U_t, V_t para el fibrado unitario."""
        x = self.punto()
        p_unit = self.covector_unitario(x)
        return {
            "x": x,
            "p": self.covector(),
            "U": self.germen(),
            "V": self.germen(),
            "p_unit": p_unit,
            "U_t": self.germen(tangencial=True, x=x, p=p_unit),
            "V_t": self.germen(tangencial=True, x=x, p=p_unit),
        }

    def configuraciones_oraculo(self, cantidad: int) -> list:
        return [self.configuracion_oraculo() for _ in range(cantidad)]
