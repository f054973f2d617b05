"""
Importación desde ficheros de texto tipo COLMAP: una línea por punto
"id x y z" y una por cámara "id qw qx qy qz tx ty tz fx fy cx cy W H imagen".
Las líneas vacías y las que empiezan por '#' se ignoran.
"""

import logging
import os
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorEntradaInvalida
from model.escena.ancla import Ancla
from model.escena.gaussiana import cuaternion_a_rotacion, normalizar_cuaterniones
from model.escena.paquete_escena import PaqueteEscena
from model.escena.vista_camara import VistaCamara
from model.fusion.red_fusion_jerarquica import ParametrosHRFN

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

CargadorImagen = Callable[[str], np.ndarray]


def _lineas_utiles(ruta: str) -> List[Tuple[int, List[str]]]:
    try:
        with open(ruta, 'r', encoding='utf-8') as fichero:
            lineas = fichero.readlines()
    except OSError as e:
        logger.error(f"No se pudo abrir '{ruta}': {e}")
        raise ErrorEntradaInvalida(f"Fichero ilegible: {ruta}") from e
    resultado = []
    for numero, linea in enumerate(lineas, start=1):
        linea = linea.strip()
        if len(linea) > 0 and linea[0] != '#':
            resultado.append((numero, linea.split()))
    return resultado


def leer_puntos(ruta: str) -> Dict[int, np.ndarray]:
    """
    Lee "id x y z" por línea (columnas adicionales, como el color, se ignoran).

    Raises:
        ErrorEntradaInvalida: Si una línea está mal formada.
    """
    puntos: Dict[int, np.ndarray] = {}
    for numero, elems in _lineas_utiles(ruta):
        try:
            puntos[int(elems[0])] = np.array(tuple(map(float, elems[1:4])))
            if puntos[int(elems[0])].shape != (3,):
                raise ValueError("faltan coordenadas")
        except (ValueError, IndexError) as e:
            logger.error(f"{ruta}:{numero}: punto mal formado ({e}).")
            raise ErrorEntradaInvalida(f"Línea {numero} de '{ruta}' mal formada.") from e
    return puntos


def leer_camaras(ruta: str) -> List[Dict]:
    """
    Lee "id qw qx qy qz tx ty tz fx fy cx cy W H imagen" por línea. El cuaternión
    y la traslación son mundo→cámara.

    Raises:
        ErrorEntradaInvalida: Si una línea está mal formada.
    """
    camaras = []
    for numero, elems in _lineas_utiles(ruta):
        if len(elems) < 15:
            logger.error(f"{ruta}:{numero}: se esperaban 15 columnas, hay {len(elems)}.")
            raise ErrorEntradaInvalida(f"Línea {numero} de '{ruta}' mal formada.")
        try:
            valores = list(map(float, elems[1:12]))
            camaras.append({
                'id': int(elems[0]),
                'qvec': np.array(valores[0:4]),
                'tvec': np.array(valores[4:7]),
                'fx': valores[7], 'fy': valores[8], 'cx': valores[9], 'cy': valores[10],
                'ancho': int(elems[12]), 'alto': int(elems[13]),
                'imagen': ' '.join(elems[14:]),
            })
        except ValueError as e:
            logger.error(f"{ruta}:{numero}: cámara mal formada ({e}).")
            raise ErrorEntradaInvalida(f"Línea {numero} de '{ruta}' mal formada.") from e
    return camaras


def voxelizar(puntos: np.ndarray, tamano_voxel: float) -> np.ndarray:
    """Centros de los vóxeles ocupados, en orden lexicográfico de índice de vóxel."""
    indices = np.unique(np.floor(np.asarray(puntos) / tamano_voxel).astype(np.int64), axis=0)
    return (indices + 0.5) * tamano_voxel


def importar_colmap(ruta_puntos: str, ruta_camaras: str, config: ConfiguracionEscena,
                    cargar_imagen: Optional[CargadorImagen] = None, directorio_imagenes: Optional[str] = None,
                    retenidas: Tuple[int, ...] = ()) -> PaqueteEscena:
    """
    Construye una escena entrenable: un ancla por vóxel ocupado (offsets nulos),
    una vista por cámara con apariencia inicializada con la semilla de la
    configuración, y una HRFN nueva.

    Args:
        cargar_imagen: Función ruta → imagen H×W×3 en [0,1]; sin ella las vistas no tienen imagen.
        directorio_imagenes: Directorio base de las rutas de imagen relativas.
        retenidas: Ids de cámara que se marcan como no usadas en entrenamiento.

    Raises:
        ErrorEntradaInvalida: Ficheros mal formados o sin puntos.
    """
    puntos_dict = leer_puntos(ruta_puntos)
    if not puntos_dict:
        logger.error(f"'{ruta_puntos}' no contiene puntos.")
        raise ErrorEntradaInvalida("La nube de puntos está vacía.")
    puntos = np.stack([puntos_dict[i] for i in sorted(puntos_dict)])
    rng = np.random.default_rng(config.semilla)

    anclas = [Ancla.crear(c, config) for c in voxelizar(puntos, config.tamano_voxel)]
    vistas = []
    for datos in leer_camaras(ruta_camaras):
        R = cuaternion_a_rotacion(normalizar_cuaterniones(datos['qvec']))
        U, _, Vt = np.linalg.svd(R)
        imagen = None
        if cargar_imagen is not None:
            ruta_imagen = datos['imagen']
            if directorio_imagenes is not None and not os.path.isabs(ruta_imagen):
                ruta_imagen = os.path.join(directorio_imagenes, ruta_imagen)
            imagen = cargar_imagen(ruta_imagen)
        vista = VistaCamara(id=datos['id'], rotacion=U @ Vt, traslacion=datos['tvec'], fx=datos['fx'],
                            fy=datos['fy'], cx=datos['cx'], cy=datos['cy'], ancho=datos['ancho'],
                            alto=datos['alto'], imagen_gt=imagen, nombre_imagen=datos['imagen'],
                            entrenamiento=datos['id'] not in retenidas)
        vista.inicializar_apariencia(config, rng)
        vistas.append(vista)
    hrfn = ParametrosHRFN.inicializar(config, rng)
    escena = PaqueteEscena(config=config, anclas=anclas, vistas=vistas, hrfn=hrfn, puntos=puntos,
                           metadatos={'origen': 'colmap', 'puntos': os.path.basename(ruta_puntos),
                                      'camaras': os.path.basename(ruta_camaras)})
    logger.info(f"Importados {len(puntos)} puntos → {len(anclas)} anclas y {len(vistas)} cámaras.")
    return escena
