"""
Generador de escenas sintéticas: Gaussianas de colores sobre un plano de suelo,
cámaras en anillo e imágenes de referencia producidas por el propio
rasterizador con una perturbación de apariencia por vista (tinte + viñeteado).
"""

import logging
from typing import Any, ClassVar, Dict, Optional

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.escena.ancla import Ancla
from model.escena.gaussiana import normalizar_cuaterniones
from model.escena.nube_gaussianas import NubeGaussianas
from model.escena.paquete_escena import PaqueteEscena
from model.escena.vista_camara import VistaCamara
from model.fusion.red_fusion_jerarquica import ParametrosHRFN
from model.render.rasterizador import render

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

OPACIDAD_REAL = 0.8
OPACIDAD_ENTRENABLE = 0.7
INTENSIDAD_VINETEADO = 0.3


def aplicar_apariencia(imagen: np.ndarray, tinte: np.ndarray, vineteado: float = INTENSIDAD_VINETEADO) -> np.ndarray:
    """Multiplica por un tinte global RGB y un viñeteado radial 1 − v·r², y recorta a [0, 1]."""
    H, W, _ = imagen.shape
    ys, xs = np.mgrid[0:H, 0:W].astype(np.float64)
    rx = (xs - (W - 1) / 2.0) / (W / 2.0)
    ry = (ys - (H - 1) / 2.0) / (H / 2.0)
    r2 = 0.5 * (rx ** 2 + ry ** 2)
    return np.clip(imagen * tinte[None, None, :] * (1.0 - vineteado * r2)[..., None], 0.0, 1.0)


class GeneradorSintetico:
    """
    Construye escenas sintéticas reproducibles a partir de un preset con nombre.
    """

    PARAMETROS_POR_PRESET: ClassVar[Dict[str, Dict[str, Any]]] = {
        'tiny': {'preset_escena': 'tiny', 'anclas': 10, 'vistas': 8, 'retenidas': 2, 'lado': 64,
                 'radio_anillo': 3.0, 'altura': 1.5, 'extension': 1.0},
        'medium': {'preset_escena': 'medium', 'anclas': 40, 'vistas': 16, 'retenidas': 4, 'lado': 96,
                   'radio_anillo': 4.0, 'altura': 2.0, 'extension': 2.0},
        'toy': {'preset_escena': 'toy', 'anclas': 4, 'vistas': 3, 'retenidas': 1, 'lado': 24,
                'radio_anillo': 3.0, 'altura': 1.5, 'extension': 0.8},
    }
    DEFAULT_PRESET: ClassVar[str] = 'tiny'

    def __init__(self, preset: str = 'tiny', semilla: int = 0, config: Optional[ConfiguracionEscena] = None):
        if preset not in self.PARAMETROS_POR_PRESET:
            logger.warning(f"Preset sintético '{preset}' no reconocido. Usando '{self.DEFAULT_PRESET}'.")
            preset = self.DEFAULT_PRESET
        self.preset = preset
        self.parametros = self.PARAMETROS_POR_PRESET[preset]
        self.semilla = semilla
        self.config = config or ConfiguracionEscena.desde_preset(self.parametros['preset_escena'], semilla=semilla)

    def generar(self) -> PaqueteEscena:
        """
        Genera la escena: anclas con offsets, escalas y rotaciones aleatorias
        (congeladas), colores reales aleatorios usados solo para las imágenes de
        referencia, y apariencia/HRFN inicializadas con la semilla.
        """
        cfg = self.config
        par = self.parametros
        rng = np.random.default_rng(self.semilla)
        extension = par['extension']

        anclas = []
        for _ in range(par['anclas']):
            centro = np.array([rng.uniform(-extension, extension), rng.uniform(-extension, extension),
                               rng.uniform(0.0, 0.2)])
            ancla = Ancla.crear(centro, cfg)
            ancla.offsets = rng.normal(0.0, 0.6, size=(cfg.k, 3))
            ancla.escalas = cfg.tamano_voxel * rng.uniform(0.3, 0.6, size=(cfg.k, 3))
            ancla.rotaciones = normalizar_cuaterniones(rng.normal(size=(cfg.k, 4)))
            ancla.opacidades = np.full(cfg.k, OPACIDAD_ENTRENABLE)
            anclas.append(ancla)

        nube = NubeGaussianas.desde_anclas(anclas)
        colores_reales = rng.uniform(0.1, 0.9, size=(len(nube), 3))
        opacidades_reales = np.full(len(nube), OPACIDAD_REAL)

        lado = par['lado']
        total_vistas = par['vistas'] + par['retenidas']
        vistas = []
        for i in range(total_vistas):
            angulo = 2.0 * np.pi * (i + 0.5 * (i >= par['vistas'])) / par['vistas']
            centro = np.array([par['radio_anillo'] * np.cos(angulo), par['radio_anillo'] * np.sin(angulo), par['altura']])
            vista = VistaCamara.mirando_a(i, centro, np.zeros(3), focal=1.2 * lado, ancho=lado, alto=lado,
                                          entrenamiento=i < par['vistas'], nombre_imagen=f'vista_{i:03d}.png')
            limpia = render(nube, vista, colores_reales, opacidades_reales, plano_cercano=cfg.plano_cercano).imagen
            tinte = 1.0 + 0.1 * rng.standard_normal(3)
            vista.imagen_gt = aplicar_apariencia(limpia, tinte)
            vista.inicializar_apariencia(cfg, rng)
            vistas.append(vista)

        hrfn = ParametrosHRFN.inicializar(cfg, rng)
        puntos = nube.medias + rng.normal(0.0, 0.01, size=nube.medias.shape)
        escena = PaqueteEscena(config=cfg, anclas=anclas, vistas=vistas, hrfn=hrfn, puntos=puntos,
                               metadatos={'origen': 'sintetico', 'preset': self.preset, 'semilla': str(self.semilla)})
        logger.info(f"Escena sintética '{self.preset}' (semilla {self.semilla}): {len(anclas)} anclas, "
                    f"{len(nube)} Gaussianas, {par['vistas']} vistas de entrenamiento y {par['retenidas']} retenidas.")
        return escena


def generar_escena(preset: str = 'tiny', semilla: int = 0, config: Optional[ConfiguracionEscena] = None) -> PaqueteEscena:
    return GeneradorSintetico(preset, semilla, config).generar()
