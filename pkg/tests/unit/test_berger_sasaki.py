import allure
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geometria.base_geometry import inverse_metric_at
from geometria.berger_sasaki import (
    BergerSasakiConfig, CampoGerm, bs_connection, bs_metric, calR, cotangent_point, gauss_projection, lift_bracket, lifted,
    lifted_to_coords, liouville_connection, normal_field, tangential_lift, unit_bundle_connection, vertical_derivative_bs_metric,
)
from geometria.coordinate_oracle import (
    desviacion_relativa, frame_round_trip_error, koszul_inner, metric_frame_consistency, oracle_connection,
    oracle_unit_connection,
)
from manifolds import cp1
from utils.errores import MissingDerivative, NonTangentialArgument, NotOnUnitBundle
from utils.generador_datos import GeneradorConfiguraciones
from utils.test_helpers import afirmar_cercano, afirmar_menor

X0 = np.array([0.3, -0.2])
P0 = np.array([0.7, 1.1])
componente = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def _unitario(carta, x, p):
    g_inv = inverse_metric_at(carta, x)
    return np.asarray(p, dtype=float) / np.sqrt(float(p @ g_inv @ p))


@allure.id("BS-T001")
@allure.title("[ID: BS-T001] Con δ = 0 la métrica se reduce a la de Sasaki.")
def test_metrica_sasaki_en_delta_cero(carta_cp1, configuracion_metrica, rng) -> None:
    """
    [ID: BS-T001] ᴮˢg = g ⊕ g⁻¹ cuando δ = 0.
    """
    cfg = configuracion_metrica(carta_cp1, 0.0)
    cp = cotangent_point(cfg, X0, P0)
    X, Y, w, t = (rng.standard_normal(2) for _ in range(4))
    esperado = float(X @ cp.geo.g @ Y) + float(w @ cp.geo.g_inv @ t)
    afirmar_cercano(bs_metric(cfg, cp, lifted(cp, X, w), lifted(cp, Y, t)), esperado, 1e-12, "Sasaki")


def test_deformacion_en_la_direccion_pJ(carta_cp1, configuracion_metrica) -> None:
    """[ID: BS-T002] ᴮˢg(ⱽ(pJ), ⱽ(pJ)) = r²λ: la deformación solo estira la dirección pJ."""
    cfg = configuracion_metrica(carta_cp1, 0.8)
    cp = cotangent_point(cfg, X0, P0)
    V = lifted(cp, omega=cp.pJ)
    afirmar_cercano(bs_metric(cfg, cp, V, V), cp.r2 * cp.lam, 1e-12, "ᴮˢg(ⱽpJ, ⱽpJ)", relativa=True)
    # ⱽp es ortogonal a ⱽ(pJ) y no se deforma
    N = normal_field(cfg, cp)
    afirmar_cercano(bs_metric(cfg, cp, N, V), 0.0, 1e-12, "ᴮˢg(ⱽp, ⱽpJ)")
    afirmar_cercano(bs_metric(cfg, cp, N, N), cp.r2, 1e-12, "ᴮˢg(ⱽp, ⱽp)", relativa=True)


@settings(max_examples=30, deadline=None)
@given(a=componente, b=componente, c=componente, d=componente, delta=st.floats(min_value=0.0, max_value=2.0))
def test_metrica_simetrica_y_definida_positiva(a, b, c, d, delta) -> None:
    """[ID: BS-T003] ᴮˢg es simétrica y ᴮˢg(U,U) ≥ g(X,X) + g⁻¹(ω,ω)."""
    cfg = BergerSasakiConfig.desde_carta(cp1.construir_carta(), delta)
    cp = cotangent_point(cfg, X0, P0)
    U = lifted(cp, [a, b], [c, d])
    W = lifted(cp, [d, -a], [b, c])
    assert abs(bs_metric(cfg, cp, U, W) - bs_metric(cfg, cp, W, U)) < 1e-12
    sasaki = float(U.horizontal @ cp.geo.g @ U.horizontal) + float(U.vertical @ cp.geo.g_inv @ U.vertical)
    assert bs_metric(cfg, cp, U, U) >= sasaki - 1e-12


def test_marco_adaptado_y_coordenadas(carta_cp1, configuracion_metrica, rng) -> None:
    """[ID: BS-T004] Ida y vuelta marco adaptado ↔ coordenadas y consistencia con la métrica inducida."""
    cfg = configuracion_metrica(carta_cp1, 0.5)
    cp = cotangent_point(cfg, X0, P0)
    U = lifted(cp, rng.standard_normal(2), rng.standard_normal(2))
    V = lifted(cp, rng.standard_normal(2), rng.standard_normal(2))
    afirmar_menor(frame_round_trip_error(cfg, cp, U), 1e-12, "ida y vuelta")
    afirmar_menor(metric_frame_consistency(cfg, cp, U, V), 1e-10, "G vs ᴮˢg")


@allure.id("BS-T005")
@allure.title("[ID: BS-T005] La conexión cerrada no tiene torsión: ∇_U V − ∇_V U = [U,V].")
@pytest.mark.parametrize("delta", [0.0, 0.5, 1.3])
def test_conexion_sin_torsion(entrada_cp1, carta_cp1, configuracion_metrica, delta) -> None:
    """
    [ID: BS-T005] Torsión nula de ᴮˢ∇ contra el corchete de levantamientos.

    Flujo:
        1. Generar gérmenes aleatorios con semilla fija.
        2. Comparar ∇_U V − ∇_V U con lift_bracket(U, V) componente a componente.
    """
    cfg = configuracion_metrica(carta_cp1, delta)
    generador = GeneradorConfiguraciones(entrada_cp1, seed=3)
    for _ in range(3):
        x = generador.punto()
        cp = cotangent_point(cfg, x, generador.covector())
        U, V = generador.germen(), generador.germen()
        torsion = bs_connection(cfg, cp, U, V) - bs_connection(cfg, cp, V, U)
        afirmar_cercano(torsion.como_arreglo(), lift_bracket(cfg, cp, U, V).como_arreglo(), 1e-8, "torsión")


@allure.id("BS-T006")
@allure.title("[ID: BS-T006] Fórmula de Koszul: 2ᴮˢg(∇_U V, W) sin pasar por Christoffel.")
def test_koszul(entrada_cp1, carta_cp1, configuracion_metrica) -> None:
    """
    [ID: BS-T006] La conexión cerrada satisface la fórmula de Koszul en coordenadas.
    """
    cfg = configuracion_metrica(carta_cp1, 0.5)
    generador = GeneradorConfiguraciones(entrada_cp1, seed=7)
    x, p = generador.punto(), generador.covector()
    cp = cotangent_point(cfg, x, p)
    U, V, W = generador.germen(), generador.germen(), generador.germen()
    cerrada = 2.0 * bs_metric(cfg, cp, bs_connection(cfg, cp, U, V),
                              lifted(cp, W.X, W.omega))
    koszul = koszul_inner(cfg, x, p, U, V, W)
    afirmar_cercano(cerrada, koszul, 1e-5, "Koszul", relativa=True)


def test_campo_de_liouville(carta_cp1, configuracion_metrica, rng) -> None:
    """[ID: BS-T007] Las cinco derivadas con ⱽp coinciden con bs_connection sobre el germen de Liouville."""
    cfg = configuracion_metrica(carta_cp1, 0.9)
    cp = cotangent_point(cfg, X0, P0)
    X, omega = rng.standard_normal(2), rng.standard_normal(2)
    cero = np.zeros((2, 2))
    liouville = CampoGerm(np.zeros(2), np.zeros(2), cero, cero, liouville=1.0)
    vertical = CampoGerm(np.zeros(2), omega, cero, cero)
    horizontal = CampoGerm(X, np.zeros(2), cero, cero)
    liouville = liouville_connection(cfg, cp, X, omega)

    assert set(liouville) == {"H_X__V_p", "V_p__H_X", "V_omega__V_p", "V_p__V_omega", "V_p__V_p"}
    pares = {
        "H_X__V_p": (horizontal, liouville),
        "V_p__H_X": (liouville, horizontal),
        "V_omega__V_p": (vertical, liouville),
        "V_p__V_omega": (liouville, vertical),
        "V_p__V_p": (liouville, liouville),
    }
    for clave, (U, V) in pares.items():
        afirmar_cercano(bs_connection(cfg, cp, U, V).como_arreglo(), liouville[clave].como_arreglo(), 1e-10, clave)
    np.testing.assert_allclose(liouville["V_p__V_p"].vertical, cp.p)


def test_derivada_vertical_de_la_metrica(carta_cp1, configuracion_metrica, rng) -> None:
    """[ID: BS-T008] ⱽη ᴮˢg(ⱽω,ⱽθ) frente a la derivada numérica en la fibra."""
    cfg = configuracion_metrica(carta_cp1, 0.7)
    eta, omega, theta = (rng.standard_normal(2) for _ in range(3))
    h = 1e-6

    def metrica_vertical(p):
        cp = cotangent_point(cfg, X0, p)
        return bs_metric(cfg, cp, lifted(cp, omega=omega), lifted(cp, omega=theta))

    numerica = (metrica_vertical(P0 + h * eta) - metrica_vertical(P0 - h * eta)) / (2.0 * h)
    cerrada = vertical_derivative_bs_metric(cfg, cotangent_point(cfg, X0, P0), eta, omega, theta)
    afirmar_cercano(cerrada, numerica, 1e-7, "ⱽη ᴮˢg", relativa=True)


@allure.id("BS-T009")
@allure.title("[ID: BS-T009] Fibrado unitario: levantamiento tangencial, proyección de Gauss y conexión inducida.")
def test_fibrado_unitario(entrada_cp1, carta_cp1, configuracion_metrica) -> None:
    """
    [ID: BS-T009] Objetos tangentes a T*₁M.

    Flujo:
        1. ᵀω es ortogonal a 𝒩 = ⱽp.
        2. La proyección de Gauss anula la componente normal.
        3. La conexión inducida es tangente a T*₁M.
    """
    cfg = configuracion_metrica(carta_cp1, 0.6)
    generador = GeneradorConfiguraciones(entrada_cp1, seed=11)
    x = generador.punto()
    p = generador.covector_unitario(x)
    cp = cotangent_point(cfg, x, p)
    N = normal_field(cfg, cp)

    afirmar_menor(abs(bs_metric(cfg, cp, tangential_lift(cfg, cp, generador.covector()), N)), 1e-12, "ᵀω ⟂ 𝒩")
    W = lifted(cp, generador.covector(), generador.covector())
    afirmar_menor(abs(bs_metric(cfg, cp, gauss_projection(cfg, cp, W), N)), 1e-12, "Gauss ⟂ 𝒩")

    U, V = generador.germen(True, x, p), generador.germen(True, x, p)
    afirmar_menor(abs(bs_metric(cfg, cp, unit_bundle_connection(cfg, cp, U, V), N)), 1e-10, "∇̂ ⟂ 𝒩")


def test_errores_del_fibrado_unitario(carta_cp1, configuracion_metrica) -> None:
    """[ID: BS-T010] Fuera de r² = 1 o con fibra no ortogonal a p las operaciones se rechazan."""
    cfg = configuracion_metrica(carta_cp1, 0.5)
    cp = cotangent_point(cfg, X0, 3.0 * _unitario(carta_cp1, X0, P0))
    with pytest.raises(NotOnUnitBundle):
        tangential_lift(cfg, cp, [1.0, 0.0])

    p = _unitario(carta_cp1, X0, P0)
    cp_unit = cotangent_point(cfg, X0, p)
    radial = CampoGerm.constante([0.0, 0.0], p, tangencial=True)
    tangente = CampoGerm.constante([1.0, 0.0], [0.0, 0.0], tangencial=True)
    with pytest.raises(NonTangentialArgument):
        unit_bundle_connection(cfg, cp_unit, tangente, radial)


def test_derivadas_faltantes(carta_cp1, configuracion_metrica) -> None:
    """[ID: BS-T011] Sin jacobiano de V los casos horizontales no pueden evaluarse."""
    cfg = configuracion_metrica(carta_cp1, 0.5)
    cp = cotangent_point(cfg, X0, P0)
    U = CampoGerm(np.array([1.0, 0.0]), np.zeros(2))
    V = CampoGerm(np.array([0.0, 1.0]), np.zeros(2))
    with pytest.raises(MissingDerivative):
        bs_connection(cfg, cp, U, V)
    with pytest.raises(MissingDerivative):
        lift_bracket(cfg, cp, U, V)
    # Con U puramente vertical no se necesitan derivadas de V
    vertical = CampoGerm(np.zeros(2), np.array([1.0, 0.0]))
    assert bs_connection(cfg, cp, vertical, V).como_arreglo().shape == (4,)


def test_operador_calR_en_cp1(carta_cp1, configuracion_metrica, rng) -> None:
    """[ID: BS-T012] En curvatura constante ℛ(ϑ̃′,ϑ̃) es múltiplo de J."""
    cfg = configuracion_metrica(carta_cp1, 0.8)
    cp = cotangent_point(cfg, X0, P0)
    M = calR(cfg, cp, rng.standard_normal(2), cp.p)
    J = cp.J
    afirmar_cercano(M @ J - J @ M, np.zeros((2, 2)), 1e-8, "[ℛ, J]")
    afirmar_cercano(M, -(J @ M @ J), 1e-8, "ℛ = −JℛJ")


@allure.id("BS-T013")
@allure.title("[ID: BS-T013] Un campo que se anula en x pero no su jacobiano sigue aportando ∇_X.")
@pytest.mark.parametrize("delta", [0.0, 0.5])
def test_germen_nulo_con_jacobiano(carta_cp1, configuracion_metrica, delta) -> None:
    """
    [ID: BS-T013] ᴮˢ∇_{ᴴX}V con V(x) = 0 y DV ≠ 0.

    Objetivo:
        ᴴ(∇_X Y) y ⱽ(∇_X θ) dependen del jacobiano aunque Y(x) = 0 y θ(x) = 0.

    Flujo:
        1. V = germen de valor nulo con DX y Domega no nulos.
        2. Comparar con DX·X y Domega·X (los términos de curvatura se anulan).
        3. Comparar con el oráculo en T*M y en el fibrado unitario.
    """
    cfg = configuracion_metrica(carta_cp1, delta)
    cp = cotangent_point(cfg, X0, P0)
    X = np.array([1.0, 0.5])
    DX = np.array([[1.0, 2.0], [0.0, 3.0]])
    Domega = np.array([[0.5, 0.0], [1.0, -1.0]])
    U = CampoGerm.constante(X, np.zeros(2))
    V = CampoGerm(np.zeros(2), np.zeros(2), DX, Domega)

    cerrada = bs_connection(cfg, cp, U, V)
    afirmar_cercano(cerrada.horizontal, DX @ X, 1e-12, "ᴴ(∇_X Y)")
    afirmar_cercano(cerrada.vertical, Domega @ X, 1e-12, "ⱽ(∇_X θ)")
    oraculo = oracle_connection(cfg, X0, P0, U, V)
    afirmar_menor(desviacion_relativa(lifted_to_coords(cfg, cerrada), oraculo), 1e-5, "oráculo T*M")

    p = _unitario(carta_cp1, X0, P0)
    cp_unit = cotangent_point(cfg, X0, p)
    U_t = CampoGerm.constante(X, np.zeros(2), tangencial=True)
    V_t = CampoGerm(np.zeros(2), np.zeros(2), DX, Domega, tangencial=True)
    cerrada_unit = unit_bundle_connection(cfg, cp_unit, U_t, V_t)
    afirmar_cercano(cerrada_unit.horizontal, DX @ X, 1e-12, "ᴴ(∇_X Y) en T*₁M")
    oraculo_unit = oracle_unit_connection(cfg, X0, p, U_t, V_t)
    afirmar_menor(desviacion_relativa(lifted_to_coords(cfg, cerrada_unit), oraculo_unit), 1e-5, "oráculo T*₁M")
