import allure
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geometria.base_geometry import (
    ManifoldChart, bianchi_residual, christoffel_at, covariant_derivative_along, derivada_temporal, flat,
    geometry_at, inner_inv, metric_checked, metric_compatibility_residual, riemann_at, sharp, validar_punto,
)
from manifolds import cp1, paper_r2
from utils.errores import GridTooCoarse, OutOfChart, SingularMetric
from utils.test_helpers import afirmar_cercano, afirmar_menor

PUNTOS_CP1 = [(0.0, 0.0), (0.3, -0.4), (-0.7, 0.2), (0.5, 0.5)]
coordenada = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


def _seccional(carta, x, ajustes) -> float:
    g = metric_checked(carta, x)
    R = riemann_at(carta, x, ajustes)
    # g(R(e1,e2)e2, e1) / (g11 g22 − g12²)
    numerador = float(np.einsum('a,a->', g[:, 0], R[:, 0, 1, 1]))
    return numerador / (g[0, 0] * g[1, 1] - g[0, 1] ** 2)


@allure.id("BG-T001")
@allure.title("[ID: BG-T001] Los Christoffel con jacobiano analítico coinciden con los de diferencias finitas.")
def test_christoffel_analitico_vs_diferencias_finitas(ajustes) -> None:
    """
    [ID: BG-T001] Christoffel de CP¹ por dos caminos.

    Objetivo:
        Asegurar que el jacobiano por diferencias centrales reproduce el analítico.

    Flujo:
        1. Construir la carta de Fubini-Study con y sin jacobiano analítico.
        2. Comparar Γ en varios puntos con tolerancia 1e-8.
    """
    analitica = cp1.construir_carta(analitica=True)
    numerica = cp1.construir_carta(analitica=False)
    for x in PUNTOS_CP1:
        afirmar_cercano(christoffel_at(numerica, x, ajustes), christoffel_at(analitica, x, ajustes), 1e-8,
                        f"Γ en {x}")


@allure.id("BG-T002")
@allure.title("[ID: BG-T002] CP¹ con Fubini-Study tiene curvatura seccional 1.")
def test_curvatura_seccional_cp1(carta_cp1, ajustes) -> None:
    """
    [ID: BG-T002] Curvatura seccional constante de CP¹.

    Objetivo:
        Validar la convención de signos del tensor de Riemann: K = 1 en la esfera unidad.
    """
    for x in PUNTOS_CP1:
        afirmar_cercano(_seccional(carta_cp1, x, ajustes), 1.0, 1e-6, f"K en {x}")


@allure.id("BG-T003")
@allure.title("[ID: BG-T003] El ejemplo en R² es plano.")
def test_ejemplo_r2_es_plano(carta_paper, ajustes) -> None:
    """
    [ID: BG-T003] R = 0 para g = diag(x², y²).
    """
    for x in [(1.0, 1.0), (2.5, 0.7), (4.0, 3.0)]:
        afirmar_menor(float(np.max(np.abs(riemann_at(carta_paper, x, ajustes)))), 1e-8, f"|R| en {x}")


@allure.id("BG-T004")
@allure.title("[ID: BG-T004] Compatibilidad métrica de Γ y primera identidad de Bianchi.")
def test_compatibilidad_metrica_y_bianchi(carta_cp1, ajustes) -> None:
    """
    [ID: BG-T004] Identidades de la conexión de Levi-Civita.

    Flujo:
        1. ∇g = 0 con tolerancia 1e-8 en los puntos de muestra.
        2. R^a_ijk + R^a_jki + R^a_kij = 0 con tolerancia 1e-8.
    """
    for x in PUNTOS_CP1:
        afirmar_menor(metric_compatibility_residual(carta_cp1, x, ajustes), 1e-8, f"∇g en {x}")
        afirmar_menor(bianchi_residual(riemann_at(carta_cp1, x, ajustes)), 1e-8, f"Bianchi en {x}")


def test_punto_fuera_de_la_carta(carta_paper) -> None:
    """[ID: BG-T005] Un punto con x ≤ 0 no pertenece al cuadrante del ejemplo en R²."""
    with pytest.raises(OutOfChart):
        validar_punto(carta_paper, [-1.0, 1.0])
    with pytest.raises(OutOfChart):
        christoffel_at(carta_paper, [1.0, 1.0, 1.0])


def test_stencil_fuera_de_la_carta() -> None:
    """[ID: BG-T006] Sin jacobiano analítico, el stencil junto al borde del dominio sale de la carta."""
    carta = paper_r2.construir_carta(analitica=False)
    with pytest.raises(OutOfChart):
        christoffel_at(carta, [1e-7, 1.0])


def test_metrica_singular() -> None:
    """[ID: BG-T007] Una métrica degenerada se rechaza con SingularMetric."""
    carta = ManifoldChart(dim=2, metric_at=lambda x: np.diag([1.0, 0.0]), nombre="degenerada")
    with pytest.raises(SingularMetric):
        metric_checked(carta, [0.0, 0.0])
    no_simetrica = ManifoldChart(dim=2, metric_at=lambda x: np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(SingularMetric):
        metric_checked(no_simetrica, [0.0, 0.0])


def test_dimension_impar_rechazada() -> None:
    """[ID: BG-T008] Las cartas deben tener dimensión par."""
    with pytest.raises(ValueError):
        ManifoldChart(dim=3, metric_at=lambda x: np.eye(3))


@settings(max_examples=25, deadline=None)
@given(x=coordenada, y=coordenada, w1=coordenada, w2=coordenada)
def test_isomorfismos_musicales_inversos(x, y, w1, w2) -> None:
    """[ID: BG-T009] flat ∘ sharp es la identidad y g⁻¹(ω,ω) = g(ω̃,ω̃)."""
    carta = cp1.construir_carta()
    punto = np.array([x, y])
    omega = np.array([w1, w2])
    omega_sharp = sharp(carta, punto, omega)
    np.testing.assert_allclose(flat(carta, punto, omega_sharp), omega, atol=1e-12)
    g = metric_checked(carta, punto)
    assert abs(inner_inv(carta, punto, omega, omega) - float(omega_sharp @ g @ omega_sharp)) < 1e-12


@allure.id("BG-T010")
@allure.title("[ID: BG-T010] Derivada temporal de 4º orden sobre malla uniforme.")
def test_derivada_temporal() -> None:
    """
    [ID: BG-T010] d/dt sin(t) = cos(t) en 201 muestras, incluidos los extremos.
    """
    t = np.linspace(0.0, 1.0, 201)
    afirmar_cercano(derivada_temporal(t, np.sin(t)), np.cos(t), 1e-7, "derivada de sin")
    with pytest.raises(GridTooCoarse):
        derivada_temporal(t[:4], np.sin(t[:4]))


@allure.id("BG-T011")
@allure.title("[ID: BG-T011] La geodésica cerrada del ejemplo en R² tiene aceleración covariante nula.")
def test_derivada_covariante_a_lo_largo_de_geodesica(carta_paper, ajustes) -> None:
    """
    [ID: BG-T011] ∇_{γ'}γ' = 0 y ∇_{γ'}ϑ = 0 sobre la curva C1.

    Flujo:
        1. Muestrear la geodésica cerrada y su covector paralelo.
        2. Derivar covariantemente a lo largo de la curva.
        3. Ambos residuos por debajo de 1e-6.
    """
    prm = paper_r2.ParametrosEjemplo()
    t = np.linspace(0.0, 2.0, 401)
    x, u = paper_r2.geodesica(t, prm)
    _, fibra = paper_r2.curva_c1(t, prm)
    aceleracion = covariant_derivative_along(carta_paper, t, x, u, u, kind="vector", settings=ajustes)
    transporte = covariant_derivative_along(carta_paper, t, x, u, fibra, kind="covector", settings=ajustes)
    afirmar_menor(float(np.max(np.abs(aceleracion))), 1e-6, "∇γ'")
    afirmar_menor(float(np.max(np.abs(transporte))), 1e-6, "∇ϑ")
    with pytest.raises(ValueError):
        covariant_derivative_along(carta_paper, t, x, u, u, kind="tensor22")


def test_cache_geometrica(carta_cp1, ajustes) -> None:
    """[ID: BG-T012] GeometryCache reúne g, g⁻¹ y Γ consistentes."""
    geo = geometry_at(carta_cp1, [0.2, 0.1], ajustes)
    np.testing.assert_allclose(geo.g @ geo.g_inv, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(geo.gamma, christoffel_at(carta_cp1, [0.2, 0.1], ajustes), atol=1e-14)
    assert geo.riemann.shape == (2, 2, 2, 2)


@allure.id("BG-T013")
@allure.title("[ID: BG-T013] Christoffel del ejemplo en R²: Γ¹₁₁ = 1/x, Γ²₂₂ = 1/y y el resto nulo.")
@pytest.mark.parametrize("analitica, tolerancia", [(True, 1e-10), (False, 1e-6)])
def test_christoffel_del_ejemplo_r2(entrada_paper, ajustes, rng, analitica, tolerancia) -> None:
    """
    [ID: BG-T013] Símbolos de Christoffel en 50 puntos de (0.5, 5)².

    Flujo:
        1. Muestrear 50 puntos de la caja de la variedad.
        2. Comparar las componentes no nulas con 1/x y 1/y (jacobiano analítico o por diferencias).
        3. Las demás componentes quedan por debajo de 1e-8.
    """
    carta = paper_r2.construir_carta(analitica=analitica)
    for x in entrada_paper.muestrear_puntos(50, rng):
        gamma = christoffel_at(carta, x, ajustes)
        afirmar_cercano(gamma[0, 0, 0], 1.0 / x[0], tolerancia, f"Γ¹₁₁ en {x}")
        afirmar_cercano(gamma[1, 1, 1], 1.0 / x[1], tolerancia, f"Γ²₂₂ en {x}")
        resto = gamma.copy()
        resto[0, 0, 0] = resto[1, 1, 1] = 0.0
        afirmar_menor(float(np.max(np.abs(resto))), 1e-8, f"componentes nulas en {x}")
