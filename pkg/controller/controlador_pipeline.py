"""
Coordina los subcomandos de la línea de órdenes: carga y guarda escenas, llama
al modelo y delega la salida (PNG, TSV, JSON) en la vista.
"""

import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.entrenamiento.configuracion_entrenamiento import ConfiguracionEntrenamiento
from model.entrenamiento.entrenador import ajustar_apariencia, evaluar_vistas, train
from model.entrenamiento.generador_sintetico import generar_escena
from model.entrenamiento.modelo_entrenable import ModeloEntrenable
from model.errores import ErrorConfiguracion, ErrorEntradaInvalida, ErrorSplat
from model.escena.importador_colmap import importar_colmap
from model.escena.paquete_escena import PaqueteEscena
from model.escena.serializador_escena import cargar_escena, guardar_escena
from model.muestreo.muestreador_micro_macro import MuestreadorMicroMacro
from model.particion.bloque import Bloque
from model.particion.calendario_rotacion import rotational_schedule
from model.particion.particionador import histograma_supervision, particionar, psg_stage2
from model.particion.tabla_visibilidad import visibility_stats
from model.wavelet.transformada_haar import dwt1, idwt1
from view.exportador_imagenes import guardar_flotante, guardar_muestras, guardar_png, leer_png
from view.presentador_tablas import (COLUMNAS_HISTOGRAMA, COLUMNAS_METRICAS, cabecera_calendario,
                                     escribir_tsv, filas_histograma, filas_metricas, guardar_tsv)

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

FICHERO_HISTOGRAMA = 'histograma_supervision.tsv'
PREFIJO_BLOQUE = 'bloque_'


def leer_dimensiones(texto: str, separador: str = 'x') -> Tuple[int, int]:
    """'64x48' → (64, 48)."""
    try:
        a, b = texto.lower().split(separador)
        return int(a), int(b)
    except ValueError as e:
        logger.error(f"Dimensiones mal formadas: '{texto}'")
        raise ErrorEntradaInvalida(f"Se esperaba el formato A{separador}B, recibido '{texto}'.") from e


def guardar_bloques(bloques: Sequence[Bloque], directorio: str) -> List[str]:
    """Un JSON por bloque: bloque_<id>.json."""
    os.makedirs(directorio, exist_ok=True)
    rutas = []
    for bloque in bloques:
        ruta = os.path.join(directorio, f'{PREFIJO_BLOQUE}{bloque.id:03d}.json')
        with open(ruta, 'w', encoding='utf-8') as fichero:
            json.dump(bloque.a_diccionario(), fichero, indent=2)
        rutas.append(ruta)
    return rutas


def cargar_bloques(directorio: str) -> List[Bloque]:
    """Lee todos los bloque_*.json de un directorio, ordenados por id."""
    if not os.path.isdir(directorio):
        logger.error(f"No existe el directorio de bloques '{directorio}'.")
        raise ErrorEntradaInvalida(f"Directorio de bloques inexistente: {directorio}")
    bloques = []
    for nombre in sorted(os.listdir(directorio)):
        if nombre.startswith(PREFIJO_BLOQUE) and nombre.endswith('.json'):
            with open(os.path.join(directorio, nombre), 'r', encoding='utf-8') as fichero:
                bloques.append(Bloque.desde_diccionario(json.load(fichero)))
    if not bloques:
        raise ErrorEntradaInvalida(f"No hay manifiestos de bloque en '{directorio}'.")
    return sorted(bloques, key=lambda b: b.id)


class ControladorPipeline:
    """
    Punto de entrada de cada subcomando. Cada método recibe los argumentos ya
    interpretados y devuelve lo que ha producido para facilitar las pruebas.
    """

    def __init__(self, config_base: Optional[ConfiguracionEscena] = None, salida: Optional[TextIO] = None):
        self.config_base = config_base or ConfiguracionEscena()
        self.salida = salida or sys.stdout

    # --- Escenas ---

    def generar(self, preset: str, semilla: int, directorio: str) -> PaqueteEscena:
        """Genera una escena sintética, la guarda y escribe sus imágenes de referencia en PNG."""
        escena = generar_escena(preset, semilla)
        guardar_escena(escena, directorio)
        for vista in escena.vistas:
            guardar_png(vista.imagen_gt, os.path.join(directorio, vista.nombre_imagen))
        return escena

    def importar(self, ruta_puntos: str, ruta_camaras: str, directorio: str,
                 directorio_imagenes: Optional[str] = None, retenidas: Sequence[int] = ()) -> PaqueteEscena:
        cargador = leer_png if directorio_imagenes is not None else None
        escena = importar_colmap(ruta_puntos, ruta_camaras, self.config_base, cargador, directorio_imagenes,
                                 tuple(retenidas))
        guardar_escena(escena, directorio)
        return escena

    def renderizar(self, directorio_escena: str, id_vista: int, ruta_png: str,
                   ruta_flotante: Optional[str] = None) -> np.ndarray:
        escena = cargar_escena(directorio_escena)
        imagen = ModeloEntrenable(escena).renderizar(id_vista)
        guardar_png(imagen, ruta_png)
        if ruta_flotante:
            guardar_flotante(imagen, ruta_flotante)
        logger.info(f"Vista {id_vista} renderizada en '{ruta_png}'.")
        return imagen

    # --- Diagnóstico ---

    def dwt_check(self, alto: int, ancho: int, semilla: int, canales: int = 4) -> Dict[str, float]:
        """Errores de reconstrucción y de conservación de energía de la DWT en un mapa aleatorio."""
        F = np.random.default_rng(semilla).standard_normal((canales, alto, ancho))
        bandas = dwt1(F)
        error_reconstruccion = float(np.max(np.abs(idwt1(bandas) - F)))
        energia_bandas = sum(float(np.sum(b ** 2)) for b in (bandas.LL, bandas.LH, bandas.HL, bandas.HH))
        resultado = {'error_reconstruccion': error_reconstruccion,
                     'error_energia': abs(float(np.sum(F ** 2)) - energia_bandas)}
        # La energía solo se conserva sin relleno
        if alto % 2 or ancho % 2:
            logger.warning("Tamaño impar: el relleno por replicación no conserva la energía.")
        escribir_tsv(['medida', 'valor'], resultado.items(), self.salida)
        return resultado

    def sample_viz(self, directorio_escena: str, id_ancla: int, id_vista: int, ruta_png: str) -> int:
        """Dibuja sobre el render de la vista las muestras estrechas y amplias de un ancla."""
        escena = cargar_escena(directorio_escena)
        if not 0 <= id_ancla < len(escena.anclas):
            logger.error(f"Ancla {id_ancla} fuera de rango (hay {len(escena.anclas)}).")
            raise ErrorEntradaInvalida(f"Ancla inexistente: {id_ancla}")
        vista = escena.vista(id_vista)
        muestras = MuestreadorMicroMacro(escena.config).muestras_frustum(escena.anclas[id_ancla], vista)
        nivel0 = [m for m in muestras if m.nivel == 0]
        marcas = [(m.uv[0], m.uv[1], m.tipo) for m in nivel0]
        if nivel0:
            marcas.append((nivel0[0].centro[0], nivel0[0].centro[1], 'centro'))
        else:
            logger.warning(f"El ancla {id_ancla} no es visible desde la vista {id_vista}.")
        escala = 1.0 / vista.escala_mapa
        fondo = ModeloEntrenable(escena).renderizar(id_vista)
        guardar_muestras(fondo, marcas, (float(escala[0]), float(escala[1])), ruta_png)
        return len(nivel0)

    def evaluar(self, directorio_escena: str, ruta_vistas: Optional[str] = None,
                ruta_config: Optional[str] = None) -> Dict[int, Dict[str, float]]:
        """
        Métricas por vista. Con una configuración de entrenamiento, las vistas
        retenidas ajustan antes su apariencia.
        """
        escena = cargar_escena(directorio_escena)
        ids = None
        if ruta_vistas:
            with open(ruta_vistas, 'r', encoding='utf-8') as fichero:
                ids = [int(i) for i in json.load(fichero)]
        if ruta_config:
            config = ConfiguracionEntrenamiento.desde_toml(ruta_config)
            for vista in escena.vistas_retenidas:
                if ids is None or vista.id in ids:
                    escena = ajustar_apariencia(escena, vista.id, config)
        metricas = evaluar_vistas(escena, ids)
        escribir_tsv(COLUMNAS_METRICAS, filas_metricas(metricas), self.salida)
        return metricas

    # --- Particionado y rotación ---

    def particionar(self, directorio_escena: str, filas: int, columnas: int, kappa: float, eta: float,
                    directorio: str) -> List[Bloque]:
        """
        División inicial, etapa 1 (visibilidad) y etapa 2 (contribución al render).
        Escribe un JSON por bloque y el histograma de supervisión con y sin etapa 1.
        """
        escena = cargar_escena(directorio_escena)
        puntos = escena.puntos_particion()
        tabla = visibility_stats(puntos, escena.vistas, kappa, escena.config.plano_cercano)
        centros = escena.centros_anclas()
        sin_etapa1 = particionar(puntos, escena.vistas, tabla, filas, columnas, centros, etapa1=False)
        bloques = particionar(puntos, escena.vistas, tabla, filas, columnas, centros, etapa1=True)
        modelo = ModeloEntrenable(escena)
        psg_stage2(bloques, [v.id for v in escena.vistas], modelo.renderizar,
                   lambda b: escena.gaussianas_de_anclas(b.anclas), eta)
        guardar_bloques(bloques, directorio)
        histogramas = {'sin_etapa1': histograma_supervision(sin_etapa1),
                       'con_etapa1': histograma_supervision(bloques)}
        guardar_tsv(os.path.join(directorio, FICHERO_HISTOGRAMA), COLUMNAS_HISTOGRAMA, filas_histograma(histogramas))
        logger.info(f"{len(bloques)} bloques escritos en '{directorio}'.")
        return bloques

    def calendario(self, num_bloques: int, num_ranuras: int, n_iter: int, total: int,
                   alternar: bool = False) -> List[List[int]]:
        calendario = rotational_schedule(num_bloques, num_ranuras, n_iter, total, alternar)
        tabla = calendario.tabla()
        escribir_tsv(cabecera_calendario(num_ranuras), tabla, self.salida)
        return tabla

    # --- Entrenamiento ---

    def entrenar(self, directorio_escena: str, ruta_config: Optional[str], directorio: str,
                 ruta_log: Optional[str] = None, directorio_bloques: Optional[str] = None) -> PaqueteEscena:
        escena = cargar_escena(directorio_escena)
        config = (ConfiguracionEntrenamiento.desde_toml(ruta_config) if ruta_config
                  else ConfiguracionEntrenamiento())
        bloques = cargar_bloques(directorio_bloques) if directorio_bloques else None
        entrenada, registro = train(escena, config, bloques)
        guardar_escena(entrenada, directorio)
        registro.escribir_tsv(ruta_log or os.path.join(directorio, 'log.tsv'))
        if registro.tiempos:
            logger.info("Tiempos: " + ', '.join(f'{f}={t:.2f}s' for f, t in sorted(registro.tiempos.items())))
        return entrenada

    # --- Despacho ---

    def ejecutar(self, args: argparse.Namespace) -> int:
        """
        Ejecuta el subcomando indicado en `args.comando`.

        Returns:
            0 si todo fue bien, 1 si el modelo señaló un error.
        """
        try:
            if args.comando == 'gen':
                self.generar(args.preset, args.seed, args.out)
            elif args.comando == 'import':
                self.importar(args.points, args.cameras, args.out, args.images, args.held_out)
            elif args.comando == 'render':
                self.renderizar(args.scene, args.view, args.out, args.raw)
            elif args.comando == 'dwt-check':
                alto, ancho = leer_dimensiones(args.size)
                self.dwt_check(alto, ancho, args.seed, args.channels)
            elif args.comando == 'sample-viz':
                self.sample_viz(args.scene, args.anchor, args.view, args.out)
            elif args.comando == 'eval':
                self.evaluar(args.scene, args.views, args.config)
            elif args.comando == 'partition':
                filas, columnas = leer_dimensiones(args.grid)
                self.particionar(args.scene, filas, columnas, args.kappa, args.eta, args.out)
            elif args.comando == 'schedule':
                self.calendario(args.blocks, args.slots, args.niter, args.total, args.alternate)
            elif args.comando == 'train':
                self.entrenar(args.scene, args.config, args.out, args.log, args.blocks)
            else:
                raise ErrorConfiguracion(f"Subcomando desconocido: {args.comando}")
        except ErrorSplat as e:
            logger.error(f"Error en '{args.comando}': {e}")
            return 1
        return 0
