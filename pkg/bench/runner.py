"""
Ejecución de experimentos y de la suite de verificación por variedad.

Cada experimento escribe sus reportes en `<out_dir>/<nombre>/`: trayectoria CSV,
invariantes JSON y, según el modo, residuo, oráculo y Frenet. Todo reporte lleva
las tolerancias usadas (`tolerancias`) y el veredicto (`pasa`).
"""
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from functools import partial
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from bench.experiment import ExperimentConfig, cargar_config
from geometria.base_geometry import bianchi_residual, metric_compatibility_residual, riemann_at
from geometria.berger_sasaki import BergerSasakiConfig, bs_connection, cotangent_point, lifted_to_coords
from geometria.coordinate_oracle import oracle_report
from geometria.geodesic_engine import (
    SISTEMAS, GeodesicState, StepPolicy, frenet_curvatures, geodesic_residual, integrate, invariant_report,
    parallelism_residual, trajectory_dataframe, unit_initial_state,
)
from geometria.kahler_structure import KahlerStructure, kahler_suite
from manifolds import paper_r2
from manifolds.registry import ManifoldRegistryEntry, obtener_registro, verificar_entrada
from utils import config
from utils.config import settings_por_defecto
from utils.errores import ConfigInvalid, GeometriaError
from utils.generador_datos import GeneradorConfiguraciones
from utils.logger import setup_logger
from utils.report_handlers import escribir_csv_atomico, escribir_json_atomico

logger = setup_logger(name='runner', console_level=logging.INFO, file_level=logging.DEBUG,
                      log_dir=config.LOGGER_DIR, json_file=config.BSG_LOG_JSON)

TOLERANCIAS = {
    "deriva_unitaria": 1e-7,
    "velocidad": 1e-6,
    "energia": 1e-7,
    "norma_transporte": 1e-8,
    "forma_cerrada": 1e-8,
    "residuo": 1e-6,
    "oraculo": 1e-5,
    "paralelismo": 1e-5,
    "compatibilidad_metrica": 1e-8,
    "bianchi": 1e-8,
    "kahler": 1e-6,
    "delta_continuidad": 1e-2,
}

MUESTRAS_RESIDUO = 1000
CONFIGURACIONES_ORACULO_VERIFY = 5


def _chequeo(valor: float, tolerancia: float) -> Dict:
    return {"valor": float(valor), "tolerancia": float(tolerancia), "pasa": bool(valor < tolerancia)}


def _config_metrica(exp: ExperimentConfig) -> Tuple[ManifoldRegistryEntry, BergerSasakiConfig]:
    entrada = obtener_registro(exp.manifold)
    ajustes = replace(settings_por_defecto(), atol=exp.atol, rtol=exp.rtol, min_step=exp.min_step,
                      renormalize=exp.renormalize)
    return entrada, BergerSasakiConfig.desde_carta(entrada.carta(), exp.delta, ajustes)


def _estado_inicial(exp: ExperimentConfig, cfg: BergerSasakiConfig) -> GeodesicState:
    if exp.curva_cerrada is not None:
        prm = paper_r2.ParametrosEjemplo.desde_dict(exp.parametros_curva)
        x0, p0, u0, v0 = paper_r2.estado_inicial(exp.curva_cerrada, prm)
    else:
        dim = cfg.chart.dim
        x0, p0, u0 = (np.asarray(getattr(exp, n), dtype=float) for n in ("x0", "p0", "u0"))
        v0 = np.zeros(dim) if exp.v0 is None else np.asarray(exp.v0, dtype=float)
    if exp.mode == "horizontal_lift":
        v0 = np.zeros_like(v0)
    if exp.mode == "unit_bundle" and exp.longitud_arco:
        return unit_initial_state(cfg, x0, p0, u0, v0)
    return GeodesicState(x0, p0, u0, v0)


# --- Modos ---

def _modo_integracion(exp: ExperimentConfig, cfg: BergerSasakiConfig, salida: str) -> Dict:
    estado = _estado_inicial(exp, cfg)
    politica = StepPolicy(metodo=exp.integrator, h=exp.step, atol=exp.atol, rtol=exp.rtol, min_step=exp.min_step,
                          renormalize=bool(exp.renormalize and exp.mode == "unit_bundle"),
                          n_muestras=exp.n_muestras)
    traj = integrate(partial(SISTEMAS[exp.mode], cfg), estado, exp.t_span, politica, cfg=cfg, modo=exp.mode)
    inv = invariant_report(cfg, traj)
    archivos = [escribir_csv_atomico(os.path.join(salida, "trayectoria.csv"), trajectory_dataframe(traj, inv))]

    chequeos: Dict[str, Dict] = {}
    if exp.mode == "unit_bundle":
        for clave in ("kappa", "mu", "r2", "orth"):
            chequeos[f"deriva_{clave}"] = _chequeo(inv.drift[clave], TOLERANCIAS["deriva_unitaria"])
        if exp.longitud_arco:
            chequeos["velocidad"] = _chequeo(inv.desviacion_velocidad, TOLERANCIAS["velocidad"])
    elif exp.mode == "horizontal_lift":
        chequeos["deriva_r2"] = _chequeo(inv.drift["r2"], TOLERANCIAS["norma_transporte"])
    else:
        energia = inv.speed ** 2 + inv.K
        chequeos["deriva_energia"] = _chequeo(float(np.max(np.abs(energia - energia[0]))), TOLERANCIAS["energia"])

    if exp.curva_cerrada is not None:
        prm = paper_r2.ParametrosEjemplo.desde_dict(exp.parametros_curva)
        x_cerrada, p_cerrada = paper_r2.muestrear_curva(exp.curva_cerrada, traj.t, prm)
        chequeos["forma_cerrada_base"] = _chequeo(float(np.max(np.abs(traj.x - x_cerrada))), TOLERANCIAS["forma_cerrada"])
        chequeos["forma_cerrada_fibra"] = _chequeo(float(np.max(np.abs(traj.p - p_cerrada))), TOLERANCIAS["forma_cerrada"])
        if exp.n_muestras is not None:
            residuo = geodesic_residual(cfg, traj.t, traj.x, traj.p)
            chequeos["residuo"] = _chequeo(residuo.maximo, TOLERANCIAS["residuo"])

    invariantes = {
        **inv.como_dict(),
        "chequeos": chequeos,
        "tolerancias": {k: v["tolerancia"] for k, v in chequeos.items()},
        "renormalizado": traj.renormalizado,
        "punto_final": traj.x[-1],
        "pasos_aceptados": traj.pasos_aceptados,
        "pasos_rechazados": traj.pasos_rechazados,
        "pasa": all(c["pasa"] for c in chequeos.values()),
    }
    archivos.append(escribir_json_atomico(os.path.join(salida, "invariantes.json"), invariantes))

    if exp.frenet:
        frenet = frenet_curvatures(cfg, traj)
        archivos.append(escribir_json_atomico(os.path.join(salida, "frenet.json"), frenet.como_dict()))
    return {"pasa": invariantes["pasa"], "chequeos": chequeos, "archivos": archivos}


def _modo_residuo(exp: ExperimentConfig, cfg: BergerSasakiConfig, salida: str) -> Dict:
    prm = paper_r2.ParametrosEjemplo.desde_dict(exp.parametros_curva)
    t = np.linspace(float(exp.t_span[0]), float(exp.t_span[1]), exp.n_muestras or MUESTRAS_RESIDUO)
    x, p = paper_r2.muestrear_curva(exp.curva_cerrada or "C1", t, prm)
    if exp.perturbacion:
        x = x + exp.perturbacion * np.sin(np.pi * (t - t[0]) / (t[-1] - t[0]))[:, None]
    residuo = geodesic_residual(cfg, t, x, p)
    chequeo = _chequeo(residuo.maximo, TOLERANCIAS["residuo"])
    archivos = [
        escribir_csv_atomico(os.path.join(salida, "residuo.csv"), pd.DataFrame({
            "t": residuo.t, "horizontal": residuo.horizontal, "fibra": residuo.fibra, "total": residuo.total,
        })),
        escribir_json_atomico(os.path.join(salida, "residuo.json"), {
            "maximo": residuo.maximo,
            "media": float(np.mean(residuo.total)),
            "muestras_excluidas_por_borde": residuo.excluidas,
            "perturbacion": exp.perturbacion,
            "tolerancias": {"residuo": TOLERANCIAS["residuo"]},
            "pasa": chequeo["pasa"],
        }),
    ]
    return {"pasa": chequeo["pasa"], "chequeos": {"residuo": chequeo}, "archivos": archivos}


def _modo_oraculo(exp: ExperimentConfig, entrada: ManifoldRegistryEntry, cfg: BergerSasakiConfig,
                  salida: str) -> Dict:
    generador = GeneradorConfiguraciones(entrada, seed=exp.seed)
    reporte = oracle_report(cfg, generador.configuraciones_oraculo(exp.n_configuraciones))
    chequeo = _chequeo(reporte["desviacion_maxima"], TOLERANCIAS["oraculo"])
    reporte.update({"tolerancias": {"oraculo": TOLERANCIAS["oraculo"]}, "pasa": chequeo["pasa"], "seed": exp.seed})
    archivo = escribir_json_atomico(os.path.join(salida, "oraculo.json"), reporte)
    return {"pasa": chequeo["pasa"], "chequeos": {"oraculo": chequeo}, "archivos": [archivo]}


def run_experiment(exp: ExperimentConfig) -> Dict:
    """
    Ejecuta un experimento ya validado y escribe sus reportes.

    Returns:
        dict: `pasa`, `chequeos` y `archivos` escritos.

    Raises:
        GeometriaError: errores de los módulos numéricos, registrados con traza.
    """
    inicio = time.time()
    salida = exp.directorio_salida
    os.makedirs(salida, exist_ok=True)
    logger.info(f"\n--- Experimento '{exp.nombre}': {exp.mode} sobre '{exp.manifold}' (δ={exp.delta}) ---")
    try:
        entrada, cfg = _config_metrica(exp)
        if exp.mode == "residual_check":
            resultado = _modo_residuo(exp, cfg, salida)
        elif exp.mode == "oracle_check":
            resultado = _modo_oraculo(exp, entrada, cfg, salida)
        else:
            resultado = _modo_integracion(exp, cfg, salida)
    except GeometriaError as e:
        logger.critical(f"\n❌ El experimento '{exp.nombre}' falló en modo '{exp.mode}': {e}", exc_info=True)
        raise

    configuracion = {k: v for k, v in exp.como_dict().items() if k != "out_dir"}
    resumen = {"config": configuracion, "chequeos": resultado["chequeos"], "pasa": resultado["pasa"],
               "tolerancias": {k: v["tolerancia"] for k, v in resultado["chequeos"].items()}}
    resultado["archivos"].append(escribir_json_atomico(os.path.join(salida, "resumen.json"), resumen))

    if resultado["pasa"]:
        logger.info(f"\n✅ Experimento '{exp.nombre}' PASA.")
    else:
        fallidos = [k for k, v in resultado["chequeos"].items() if not v["pasa"]]
        logger.warning(f"\n⚠️ Experimento '{exp.nombre}' NO PASA: {fallidos}")
    logger.info(f"\nPERFORMANCE: Experimento '{exp.nombre}' completado en {time.time() - inicio:.2f} s")
    return resultado


def ejecutar_lote(rutas: List[str], overrides: Optional[Dict] = None, workers: int = 1) -> List[Dict]:
    """
    Un experimento por proceso; los resultados se devuelven en el orden de `rutas`.

    Raises:
        ConfigInvalid: si alguna configuración es inválida o dos experimentos comparten
            directorio de salida. Se valida todo el lote antes de ejecutar.
    """
    experimentos = [cargar_config(r, overrides) for r in rutas]
    por_directorio: Dict[str, List[str]] = {}
    for ruta, exp in zip(rutas, experimentos):
        por_directorio.setdefault(os.path.abspath(exp.directorio_salida), []).append(ruta)
    repetidos = [f"dir_salida: '{d}' lo comparten {r}" for d, r in por_directorio.items() if len(r) > 1]
    if repetidos:
        logger.error(f"\n❌ Lote rechazado: {repetidos}")
        raise ConfigInvalid(repetidos)
    if workers <= 1 or len(experimentos) <= 1:
        return [run_experiment(exp) for exp in experimentos]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_experiment, experimentos))


# --- Suite de verificación ---

def _centro(entrada: ManifoldRegistryEntry) -> np.ndarray:
    bajo, alto = (np.asarray(c, dtype=float) for c in entrada.caja_muestreo)
    return 0.5 * (bajo + alto)


def _continuidad_delta(entrada: ManifoldRegistryEntry, generador: GeneradorConfiguraciones) -> Dict:
    """
    Distancia de ᴮˢ∇ a la conexión de Sasaki (δ = 0) para δ → 0. La diferencia es
    lineal en δ²: el chequeo compara diferencia/δ² entre δ = 1e-2 y δ = 1e-3.
    """
    carta = entrada.carta()
    conf = generador.configuracion_oraculo()
    sasaki = BergerSasakiConfig.desde_carta(carta, 0.0)
    base = lifted_to_coords(sasaki, bs_connection(sasaki, cotangent_point(sasaki, conf["x"], conf["p"]),
                                                  conf["U"], conf["V"]))
    diferencias, razones = [], []
    for delta in (1e-1, 1e-2, 1e-3):
        cfg = BergerSasakiConfig.desde_carta(carta, delta)
        valor = lifted_to_coords(cfg, bs_connection(cfg, cotangent_point(cfg, conf["x"], conf["p"]),
                                                    conf["U"], conf["V"]))
        diferencia = float(np.max(np.abs(valor - base)))
        diferencias.append(diferencia)
        razones.append(diferencia / delta ** 2)
    return {"deltas": [1e-1, 1e-2, 1e-3], "diferencias": diferencias, "diferencia_sobre_delta2": razones,
            **_chequeo(abs(razones[-1] - razones[-2]) / max(abs(razones[-1]), 1.0),
                        TOLERANCIAS["delta_continuidad"])}


def verify(manifold_id: str, out_dir: Optional[str] = None, seed: int = 0, n_puntos: int = 10,
           n_configuraciones: int = CONFIGURACIONES_ORACULO_VERIFY) -> Dict:
    """
    Suite completa de invariantes para una variedad registrada; escribe `verify_<id>.json`.
    El oráculo se compara en `n_configuraciones` configuraciones aleatorias por cada δ;
    el reporte lo informa en `configuraciones_oraculo`.

    Raises:
        UnknownManifold: si el id no está registrado.
    """
    inicio = time.time()
    entrada = obtener_registro(manifold_id)
    carta = entrada.carta()
    ajustes = settings_por_defecto()
    rng = np.random.default_rng(seed)
    puntos = entrada.muestrear_puntos(n_puntos, rng)
    chequeos: Dict[str, Dict] = {}
    detalle: Dict[str, object] = {"banderas": verificar_entrada(entrada, seed=seed)}

    # --- 1. Christoffel y curvatura ---
    chequeos["compatibilidad_metrica"] = _chequeo(
        max(metric_compatibility_residual(carta, x, ajustes) for x in puntos), TOLERANCIAS["compatibilidad_metrica"])
    chequeos["bianchi"] = _chequeo(max(bianchi_residual(riemann_at(carta, x, ajustes)) for x in puntos),
                                   TOLERANCIAS["bianchi"])

    if entrada.kahler:
        # --- 2. Estructura de Kähler ---
        ks = KahlerStructure(carta, ajustes)
        suites = [kahler_suite(ks, x, seed) for x in puntos]
        detalle["kahler"] = {k: max(s[k] for s in suites) for k in suites[0]}
        chequeos["kahler"] = _chequeo(max(detalle["kahler"].values()), TOLERANCIAS["kahler"])

        # --- 3. Oráculo coordenado y campo de Liouville ---
        generador = GeneradorConfiguraciones(entrada, seed=seed)
        detalle["oraculo"] = {}
        for delta in (0.0, 0.5, 1.0):
            cfg = BergerSasakiConfig.desde_carta(carta, delta, ajustes)
            reporte = oracle_report(cfg, generador.configuraciones_oraculo(n_configuraciones))
            detalle["oraculo"][str(delta)] = reporte["casos"]
            chequeos[f"oraculo_delta_{delta}"] = _chequeo(reporte["desviacion_maxima"], TOLERANCIAS["oraculo"])

        # --- 4. Continuidad en δ ---
        continuidad = _continuidad_delta(entrada, generador)
        detalle["delta_continuidad"] = continuidad
        chequeos["delta_continuidad"] = {k: continuidad[k] for k in ("valor", "tolerancia", "pasa")}

        # --- 5. Conservación en el fibrado unitario ---
        cfg = BergerSasakiConfig.desde_carta(carta, 0.7, ajustes)
        x0 = _centro(entrada)
        estado = unit_initial_state(cfg, x0, rng.standard_normal(carta.dim), rng.standard_normal(carta.dim),
                                    rng.standard_normal(carta.dim))
        traj = integrate(partial(SISTEMAS["unit_bundle"], cfg), estado, (0.0, 2.0),
                         StepPolicy(metodo="rk4", h=1e-3), cfg=cfg, modo="unit_bundle")
        inv = invariant_report(cfg, traj)
        detalle["conservacion"] = inv.como_dict()
        for clave in ("kappa", "mu", "r2", "orth"):
            chequeos[f"deriva_{clave}"] = _chequeo(inv.drift[clave], TOLERANCIAS["deriva_unitaria"])
        chequeos["velocidad"] = _chequeo(inv.desviacion_velocidad, TOLERANCIAS["velocidad"])

        # --- 6. Paralelismo de ℛ ---
        paralelismo = parallelism_residual(cfg, traj)
        detalle["paralelismo"] = {"razon": paralelismo.razon, "norma_calR_max": float(np.max(paralelismo.norma_calR))}
        if entrada.locally_symmetric:
            cota = TOLERANCIAS["paralelismo"] * max(float(np.max(paralelismo.norma_calR)), 1e-12) + 1e-10
            chequeos["paralelismo"] = _chequeo(float(np.max(paralelismo.residuo)), cota)

    pasa = all(c["pasa"] for c in chequeos.values())
    reporte = {
        "manifold": manifold_id,
        "seed": seed,
        "configuraciones_oraculo": n_configuraciones if entrada.kahler else 0,
        "chequeos": chequeos,
        "detalle": detalle,
        "tolerancias": {k: v["tolerancia"] for k, v in chequeos.items()},
        "pasa": pasa,
    }
    destino = os.path.join(out_dir or config.BSG_OUT_DIR, f"verify_{manifold_id}.json")
    escribir_json_atomico(destino, reporte)
    if pasa:
        logger.info(f"\n✅ Verificación de '{manifold_id}' completa: todos los chequeos pasan.")
    else:
        logger.warning(f"\n⚠️ Verificación de '{manifold_id}': fallan {[k for k, v in chequeos.items() if not v['pasa']]}")
    logger.info(f"\nPERFORMANCE: verify '{manifold_id}' en {time.time() - inicio:.2f} s")
    reporte["archivo"] = destino
    return reporte
