"""
Se encarga de escribir y leer imágenes: PNG de 8 bits mediante pygame (sin abrir
ninguna ventana) y volcados crudos en float32 little-endian.
"""

import logging
import os
from typing import Sequence, Tuple

os.environ.setdefault('PYGAME_HIDE_SUPPORT_PROMPT', '1')
import numpy as np  # noqa: E402
import pygame  # noqa: E402
import pygame.surfarray  # noqa: E402

from model.errores import ErrorEntradaInvalida  # noqa: E402

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

COLORES = {
    'estrecho': (255, 64, 64),
    'amplio': (64, 160, 255),
    'centro': (255, 255, 0),
}


def a_bytes(imagen: np.ndarray) -> np.ndarray:
    """Imagen H×W×3 en [0,1] → uint8 redondeado."""
    return np.round(np.clip(np.asarray(imagen, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def _superficie(imagen: np.ndarray) -> pygame.Surface:
    if imagen.ndim != 3 or imagen.shape[2] != 3:
        logger.error(f"Imagen con forma {imagen.shape}; se esperaba H×W×3.")
        raise ErrorEntradaInvalida("La imagen debe tener forma H×W×3.")
    # surfarray trabaja en (ancho, alto, canales)
    return pygame.surfarray.make_surface(np.ascontiguousarray(np.transpose(a_bytes(imagen), (1, 0, 2))))


def guardar_png(imagen: np.ndarray, ruta: str) -> str:
    """Escribe una imagen H×W×3 en [0,1] como PNG de 8 bits."""
    directorio = os.path.dirname(ruta)
    if directorio:
        os.makedirs(directorio, exist_ok=True)
    pygame.image.save(_superficie(imagen), ruta)
    logger.debug(f"PNG escrito en '{ruta}' ({imagen.shape[1]}×{imagen.shape[0]}).")
    return ruta


def leer_png(ruta: str) -> np.ndarray:
    """Lee una imagen (PNG u otro formato soportado por pygame) como H×W×3 en [0,1]."""
    try:
        superficie = pygame.image.load(ruta)
    except (pygame.error, FileNotFoundError) as e:
        logger.error(f"No se pudo leer la imagen '{ruta}': {e}")
        raise ErrorEntradaInvalida(f"Imagen ilegible: {ruta}") from e
    datos = pygame.surfarray.array3d(superficie)
    return np.transpose(datos, (1, 0, 2)).astype(np.float64) / 255.0


def guardar_flotante(imagen: np.ndarray, ruta: str) -> str:
    """Volcado crudo en float32 little-endian (sin cabecera, orden C)."""
    np.ascontiguousarray(imagen, dtype='<f4').tofile(ruta)
    return ruta


def guardar_muestras(imagen: np.ndarray, muestras: Sequence[Tuple[float, float, str]], escala: Tuple[float, float],
                     ruta: str, radio: int = 2) -> str:
    """
    Dibuja sobre la imagen las posiciones de muestreo de un ancla y guarda el PNG.

    Args:
        muestras: (u, v, tipo) en píxeles del mapa de características; tipo es
                  'estrecho', 'amplio' o 'centro'.
        escala: (W/W^F, H/H^F) para llevar las muestras a píxeles de imagen.
    """
    superficie = _superficie(imagen)
    for u, v, tipo in muestras:
        centro = (int(round(u * escala[0])), int(round(v * escala[1])))
        pygame.draw.circle(superficie, COLORES.get(tipo, COLORES['centro']), centro, radio, 1)
    directorio = os.path.dirname(ruta)
    if directorio:
        os.makedirs(directorio, exist_ok=True)
    pygame.image.save(superficie, ruta)
    return ruta
