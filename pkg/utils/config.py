import os
import dotenv
import logging
from dataclasses import dataclass
from .logger import setup_logger

# --- 0. CONFIGURACIÓN INICIAL Y CONSTANTES ---

# Ruta absoluta del directorio de config.py y raíz del proyecto (un nivel arriba)
CURRENT_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.dirname(CURRENT_DIR)

AMBIENTE_POR_DEFECTO = "qa"

# Variables numéricas: se validan solo si están definidas (todas tienen valor por defecto).
VARIABLES_ENTORNO_NUMERICAS = [
    "BSG_FD_STEP",
    "BSG_UNIT_TOLERANCE",
    "BSG_RK_ATOL",
    "BSG_RK_RTOL",
    "BSG_RK_MIN_STEP",
]
VARIABLES_ENTORNO_BOOLEANAS = [
    "BSG_FD_RICHARDSON",
    "BSG_RENORMALIZE",
    "BSG_LOG_JSON",
]

# --- 1. CONFIGURACIÓN DE AMBIENTES Y CARGA DE VARIABLES ---

DIRECTORIO_AMBIENTES = os.path.join(PROJECT_ROOT, "environments")

AMBIENTE = os.getenv("ENVIRONMENT", AMBIENTE_POR_DEFECTO)

# Ej: /environments/qa.env
archivo_dotenv = os.path.join(DIRECTORIO_AMBIENTES, f"{AMBIENTE}.env")

if os.path.exists(archivo_dotenv):
    dotenv.load_dotenv(archivo_dotenv)


def _leer_bool(nombre: str, por_defecto: str = 'False') -> bool:
    return os.getenv(nombre, por_defecto).strip().lower() in ('true', '1', 't')


def _leer_float(nombre: str, por_defecto: float) -> float:
    valor = os.getenv(nombre)
    if valor is None or not valor.strip():
        return por_defecto
    try:
        return float(valor)
    except ValueError:
        # Se valida (y se informa) más abajo, cuando el logger ya existe.
        return por_defecto


# --- 2. PARÁMETROS NUMÉRICOS ---
BSG_FD_STEP = _leer_float("BSG_FD_STEP", 1e-5)
BSG_FD_RICHARDSON = _leer_bool("BSG_FD_RICHARDSON")
BSG_UNIT_TOLERANCE = _leer_float("BSG_UNIT_TOLERANCE", 1e-9)
BSG_RK_ATOL = _leer_float("BSG_RK_ATOL", 1e-10)
BSG_RK_RTOL = _leer_float("BSG_RK_RTOL", 1e-10)
BSG_RK_MIN_STEP = _leer_float("BSG_RK_MIN_STEP", 1e-12)
BSG_RENORMALIZE = _leer_bool("BSG_RENORMALIZE")
BSG_LOG_JSON = _leer_bool("BSG_LOG_JSON")

# --- 3. RUTAS DE SALIDA ---
DIRECTORIO_BASE_EVIDENCIAS = os.path.join(PROJECT_ROOT, "reports")
LOGGER_DIR = os.path.join(DIRECTORIO_BASE_EVIDENCIAS, "log")
BSG_OUT_DIR = os.getenv("BSG_OUT_DIR") or os.path.join(DIRECTORIO_BASE_EVIDENCIAS, "experimentos")

# Datos de prueba versionados (configuraciones de experimento en JSON)
SOURCE_FILES_DIR_DATA_SOURCE = os.path.join(PROJECT_ROOT, "tests", "files", "files_data_source")

# --- 4. INICIALIZACIÓN DEL LOGGER ---

# El directorio de logs se crea ANTES de setup_logger para que el FileHandler pueda abrir el archivo.
try:
    os.makedirs(LOGGER_DIR, exist_ok=True)
except Exception as e:
    print(f"\nERROR FATAL (pre-logger): No se pudo crear el directorio de logs '{LOGGER_DIR}'.")
    raise EnvironmentError(f"\nFallo al configurar el directorio de logs: {e}")

logger = setup_logger(
    name='config_setup',
    console_level=logging.WARNING,
    file_level=logging.DEBUG,
    log_dir=LOGGER_DIR,
    json_file=BSG_LOG_JSON,
)

if os.path.exists(archivo_dotenv):
    logger.info(f"\nCargando variables de entorno para ambiente: '{AMBIENTE}' desde '{archivo_dotenv}'")
else:
    logger.warning(f"\n⚠️ Archivo de entorno '{archivo_dotenv}' NO encontrado. Usando variables del sistema y valores por defecto.")

# --- 5. FUNCIONES AUXILIARES DE VALIDACIÓN Y SETUP ---

def asegurar_directorios_existan():
    """
    Crea los directorios de salida si no existen.

    Raises:
        EnvironmentError: Si no se puede crear un directorio esencial (permisos, ruta inválida).
    """
    directorios_a_verificar = [LOGGER_DIR, BSG_OUT_DIR]

    logger.debug("\nVerificando y asegurando la existencia de directorios base...")

    for directorio in directorios_a_verificar:
        try:
            os.makedirs(directorio, exist_ok=True)
            logger.debug(f"\nDirectorio OK: {directorio}")
        except OSError as e:
            error_msg = (
                f"\nERROR CRÍTICO: Fallo al crear el directorio esencial '{directorio}'. "
                f"\nCausa probable: Permisos insuficientes o ruta inválida."
            )
            logger.critical(error_msg, exc_info=True)
            raise EnvironmentError(error_msg) from e


def validar_variables_numericas():
    """
    Valida que las variables numéricas y booleanas definidas tengan un formato legible
    y valores positivos. Las que no están definidas usan su valor por defecto.

    Raises:
        EnvironmentError: Si alguna variable definida no se puede interpretar.
    """
    invalidas = []

    for var in VARIABLES_ENTORNO_NUMERICAS:
        valor = os.getenv(var)
        if valor is None or not valor.strip():
            continue
        try:
            if float(valor) <= 0:
                invalidas.append(f"{var}='{valor}' (debe ser > 0)")
        except ValueError:
            invalidas.append(f"{var}='{valor}' (no es un número)")

    for var in VARIABLES_ENTORNO_BOOLEANAS:
        valor = os.getenv(var)
        if valor is not None and valor.strip().lower() not in ('true', 'false', '1', '0', 't', 'f', ''):
            invalidas.append(f"{var}='{valor}' (no es booleano)")

    if invalidas:
        error_msg = (
            f"\nFallo en la configuración. Ejecución detenida. "
            f"\nVariables inválidas en ambiente '{AMBIENTE}': {', '.join(invalidas)}"
        )
        logger.critical(error_msg)
        raise EnvironmentError(error_msg)

    variables_a_debuggear = [
        ("AMBIENTE", AMBIENTE),
        ("BSG_OUT_DIR", BSG_OUT_DIR),
        ("BSG_FD_STEP", BSG_FD_STEP),
        ("BSG_FD_RICHARDSON", BSG_FD_RICHARDSON),
        ("BSG_UNIT_TOLERANCE", BSG_UNIT_TOLERANCE),
        ("BSG_RK_ATOL", BSG_RK_ATOL),
        ("BSG_RK_RTOL", BSG_RK_RTOL),
        ("BSG_RK_MIN_STEP", BSG_RK_MIN_STEP),
        ("BSG_RENORMALIZE", BSG_RENORMALIZE),
    ]
    for var_name, var_value in variables_a_debuggear:
        logger.debug(f"\nConfiguración final: {var_name} = '{var_value}'")


# --- 6. AJUSTES NUMÉRICOS EXPLÍCITOS ---

@dataclass(frozen=True)
class NumericSettings:
    """Parámetros numéricos que las funciones de la librería reciben explícitamente."""
    fd_step: float = 1e-5
    richardson: bool = False
    unit_tolerance: float = 1e-9
    atol: float = 1e-10
    rtol: float = 1e-10
    min_step: float = 1e-12
    renormalize: bool = False


def settings_por_defecto() -> NumericSettings:
    """Construye NumericSettings a partir de las variables del ambiente cargado."""
    return NumericSettings(
        fd_step=BSG_FD_STEP,
        richardson=BSG_FD_RICHARDSON,
        unit_tolerance=BSG_UNIT_TOLERANCE,
        atol=BSG_RK_ATOL,
        rtol=BSG_RK_RTOL,
        min_step=BSG_RK_MIN_STEP,
        renormalize=BSG_RENORMALIZE,
    )


# --- 7. EJECUCIÓN FINAL AL IMPORTAR EL MÓDULO ---

validar_variables_numericas()
asegurar_directorios_existan()

