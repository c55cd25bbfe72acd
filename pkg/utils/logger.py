import logging
import os
from datetime import datetime

from pythonjsonlogger.json import JsonFormatter


def setup_logger(name='bsg', console_level=logging.INFO, file_level=logging.DEBUG, log_dir=None, json_file=False):
    """
    Configura y devuelve una instancia de logger con salida a consola y a archivo.

    Args:
        name (str): Nombre del logger (normalmente el del módulo).
        console_level (int): Nivel mínimo para la consola.
        file_level (int): Nivel mínimo para el archivo.
        log_dir (str, opcional): Directorio del archivo de log. Debe existir; config.py lo crea.
        json_file (bool): Si es True el archivo se escribe como JSON por línea (python-json-logger).

    Returns:
        logging.Logger: El logger configurado.
    """
    # 1. Obtener o crear una instancia del logger
    logger = logging.getLogger(name)

    # 2. Establecer el nivel mínimo
    logger.setLevel(min(console_level, file_level))

    # 3. Evitar propagación
    logger.propagate = False

    # 4. Limpiar handlers existentes
    if logger.handlers:
        for handler in logger.handlers[:]:
            logger.removeHandler(handler)
            handler.close()

    # 5. Definir el formato
    formato = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    formatter = logging.Formatter(formato, datefmt='%Y-%m-%d %H:%M:%S')

    # 6. Handler de consola
    console_handler = logging.StreamHandler()
    console_handler.setLevel(console_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # 7. Handler de archivo
    if log_dir is None:
        log_dir = os.getcwd()

    fecha = datetime.now().strftime('%Y%m%d')
    extension = "jsonl" if json_file else "log"
    # Un archivo por día y por logger: los workers de xdist comparten el mismo destino.
    log_file_path = os.path.join(log_dir, f"bsg_{name}_{fecha}.{extension}")

    file_handler = logging.FileHandler(log_file_path, encoding='utf-8')
    file_handler.setLevel(file_level)
    if json_file:
        file_handler.setFormatter(JsonFormatter(formato, datefmt='%Y-%m-%d %H:%M:%S'))
    else:
        file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    return logger
