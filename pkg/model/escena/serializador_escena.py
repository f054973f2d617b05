"""
Lectura y escritura de escenas en disco: un manifiesto escena.json y un binario
escena.bin con los tensores en float32 little-endian.
"""

import json
import logging
import os
from typing import Any, Dict, List, Tuple

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorEntradaInvalida
from model.escena.ancla import Ancla
from model.escena.paquete_escena import PaqueteEscena
from model.escena.vista_camara import VistaCamara
from model.fusion.red_fusion_jerarquica import ParametrosHRFN

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

MAGIA = b'SMWS0001'
FICHERO_MANIFIESTO = 'escena.json'
FICHERO_BINARIO = 'escena.bin'
TIPO_BINARIO = '<f4'

CAMPOS_ANCLA = ('centro', 'escala_voxel', 'offsets', 'f_v', 'nc', 'bc', 'escalas', 'rotaciones', 'opacidades')


def _tensores_escena(escena: PaqueteEscena) -> List[Tuple[str, np.ndarray]]:
    """Tabla ordenada de tensores con nombre de una escena."""
    cfg = escena.config
    A = len(escena.anclas)
    tensores: List[Tuple[str, np.ndarray]] = []
    formas_vacias = {'centro': (0, 3), 'escala_voxel': (0, 3), 'offsets': (0, cfg.k, 3), 'f_v': (0, cfg.n_v),
                     'nc': (0, cfg.k_s, 2), 'bc': (0, cfg.k_s, 2), 'escalas': (0, cfg.k, 3),
                     'rotaciones': (0, cfg.k, 4), 'opacidades': (0, cfg.k)}
    for campo in CAMPOS_ANCLA:
        valores = np.stack([getattr(a, campo) for a in escena.anclas]) if A else np.zeros(formas_vacias[campo])
        tensores.append((f'anclas.{campo}', valores))
    for m in range(1, cfg.M + 1):
        for prefijo in ('omega_n', 'omega_b'):
            valores = (np.stack([getattr(a, prefijo)[m - 1] for a in escena.anclas]) if A
                       else np.zeros((0, 4 ** m)))
            tensores.append((f'anclas.{prefijo}.{m}', valores))
    tensores.extend(escena.hrfn.a_diccionario().items())
    for vista in escena.vistas:
        tensores.append((f'vista.{vista.id}.f_g', vista.f_g))
        tensores.append((f'vista.{vista.id}.mapa', vista.mapa))
        if vista.imagen_gt is not None:
            tensores.append((f'vista.{vista.id}.imagen', vista.imagen_gt))
    if escena.puntos is not None:
        tensores.append(('puntos', escena.puntos))
    return tensores


def _vista_a_diccionario(vista: VistaCamara) -> Dict[str, Any]:
    return {
        'id': vista.id,
        'rotacion': vista.rotacion.tolist(),
        'traslacion': vista.traslacion.tolist(),
        'fx': vista.fx, 'fy': vista.fy, 'cx': vista.cx, 'cy': vista.cy,
        'ancho': vista.ancho, 'alto': vista.alto,
        'nombre_imagen': vista.nombre_imagen,
        'entrenamiento': vista.entrenamiento,
    }


def guardar_escena(escena: PaqueteEscena, directorio: str) -> Tuple[str, str]:
    """
    Escribe escena.json y escena.bin en `directorio` (se crea si no existe).
    Las cámaras van en el JSON a precisión completa; los tensores en el binario.

    Returns:
        (ruta del manifiesto, ruta del binario).
    """
    os.makedirs(directorio, exist_ok=True)
    tabla = []
    desplazamiento = 0
    ruta_bin = os.path.join(directorio, FICHERO_BINARIO)
    with open(ruta_bin, 'wb') as binario:
        binario.write(MAGIA)
        for nombre, tensor in _tensores_escena(escena):
            datos = np.ascontiguousarray(tensor, dtype=TIPO_BINARIO)
            binario.write(datos.tobytes())
            tabla.append({'nombre': nombre, 'forma': list(datos.shape), 'desplazamiento': desplazamiento})
            desplazamiento += datos.size
    manifiesto = {
        'formato': MAGIA.decode('ascii'),
        'config': escena.config.a_diccionario(),
        'num_anclas': len(escena.anclas),
        'vistas': [_vista_a_diccionario(v) for v in escena.vistas],
        'tensores': tabla,
        'metadatos': escena.metadatos,
    }
    ruta_json = os.path.join(directorio, FICHERO_MANIFIESTO)
    with open(ruta_json, 'w', encoding='utf-8') as fichero:
        json.dump(manifiesto, fichero, indent=2)
    logger.info(f"Escena guardada en '{directorio}': {len(tabla)} tensores, {desplazamiento} valores.")
    return ruta_json, ruta_bin


def cargar_escena(directorio: str) -> PaqueteEscena:
    """
    Lee una escena escrita por `guardar_escena`. Los cuaterniones se renormalizan
    al cargar.

    Raises:
        ErrorEntradaInvalida: Si faltan ficheros, la magia no coincide o falta algún tensor.
    """
    ruta_json = os.path.join(directorio, FICHERO_MANIFIESTO)
    ruta_bin = os.path.join(directorio, FICHERO_BINARIO)
    try:
        with open(ruta_json, 'r', encoding='utf-8') as fichero:
            manifiesto = json.load(fichero)
        with open(ruta_bin, 'rb') as binario:
            contenido = binario.read()
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"No se pudo leer la escena de '{directorio}': {e}")
        raise ErrorEntradaInvalida(f"Escena ilegible en '{directorio}'.") from e
    if not contenido.startswith(MAGIA):
        logger.error(f"Cabecera desconocida en '{ruta_bin}': {contenido[:8]!r}")
        raise ErrorEntradaInvalida("El binario de la escena no empieza por la magia esperada.")

    datos = np.frombuffer(contenido, dtype=TIPO_BINARIO, offset=len(MAGIA))
    tensores: Dict[str, np.ndarray] = {}
    for entrada in manifiesto['tensores']:
        forma = tuple(entrada['forma'])
        inicio = entrada['desplazamiento']
        tamano = int(np.prod(forma, dtype=np.int64))
        if inicio + tamano > datos.size:
            raise ErrorEntradaInvalida(f"El tensor '{entrada['nombre']}' excede el binario.")
        tensores[entrada['nombre']] = datos[inicio:inicio + tamano].astype(np.float64).reshape(forma)

    def tensor(nombre: str) -> np.ndarray:
        if nombre not in tensores:
            logger.error(f"Tensor '{nombre}' ausente en '{ruta_json}'.")
            raise ErrorEntradaInvalida(f"Falta el tensor '{nombre}' en la escena.")
        return tensores[nombre]

    config = ConfiguracionEscena.desde_diccionario(manifiesto['config'])
    anclas = []
    for i in range(int(manifiesto['num_anclas'])):
        campos = {campo: tensor(f'anclas.{campo}')[i] for campo in CAMPOS_ANCLA}
        anclas.append(Ancla(
            omega_n=[tensor(f'anclas.omega_n.{m}')[i] for m in range(1, config.M + 1)],
            omega_b=[tensor(f'anclas.omega_b.{m}')[i] for m in range(1, config.M + 1)],
            **campos,
        ))
    vistas = []
    for d in manifiesto['vistas']:
        id_vista = int(d['id'])
        imagen = tensores.get(f'vista.{id_vista}.imagen')
        vistas.append(VistaCamara(
            id=id_vista, rotacion=np.array(d['rotacion']), traslacion=np.array(d['traslacion']),
            fx=d['fx'], fy=d['fy'], cx=d['cx'], cy=d['cy'], ancho=d['ancho'], alto=d['alto'],
            f_g=tensor(f'vista.{id_vista}.f_g'), mapa=tensor(f'vista.{id_vista}.mapa'),
            imagen_gt=imagen, nombre_imagen=d.get('nombre_imagen'), entrenamiento=bool(d.get('entrenamiento', True)),
        ))
    hrfn = ParametrosHRFN.desde_diccionario({n: t for n, t in tensores.items() if n.startswith('hrfn.')},
                                            config.frecuencias_pe)
    escena = PaqueteEscena(config=config, anclas=anclas, vistas=vistas, hrfn=hrfn,
                           puntos=tensores.get('puntos'), metadatos=dict(manifiesto.get('metadatos', {})))
    logger.info(f"Escena cargada de '{directorio}': {len(anclas)} anclas, {len(vistas)} vistas.")
    return escena
