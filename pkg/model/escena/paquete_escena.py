"""
Define PaqueteEscena: anclas, vistas, configuración y parámetros de la red de
fusión de una escena completa.
"""

import copy
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorEntradaInvalida
from model.escena.ancla import Ancla
from model.escena.nube_gaussianas import NubeGaussianas
from model.escena.vista_camara import VistaCamara
from model.fusion.red_fusion_jerarquica import ParametrosHRFN

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)


@dataclass
class PaqueteEscena:
    """
    Contenedor de una escena. Es inmutable durante el renderizado y la evaluación;
    solo se modifica entre pasos del optimizador (o se copia con `copiar`).

    `puntos` es la nube dispersa (P,3) usada por el particionador; si falta, se
    usan los centros de las anclas.
    """
    config: ConfiguracionEscena
    anclas: List[Ancla]
    vistas: List[VistaCamara]
    hrfn: ParametrosHRFN
    puntos: Optional[np.ndarray] = None
    metadatos: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.validar()

    def validar(self):
        """
        Comprueba que todas las anclas y vistas comparten la configuración y que los
        ids de vista son únicos.

        Raises:
            ErrorEntradaInvalida: Si algo no cuadra.
        """
        ids = [v.id for v in self.vistas]
        if len(ids) != len(set(ids)):
            logger.error(f"Ids de vista duplicados: {ids}")
            raise ErrorEntradaInvalida("Los ids de vista deben ser únicos.")
        for ancla in self.anclas:
            ancla.validar(self.config)
        for vista in self.vistas:
            vista.validar(self.config)
        self.hrfn.validar(self.config)
        if self.puntos is not None:
            self.puntos = np.asarray(self.puntos, dtype=np.float64).reshape(-1, 3)

    # --- Acceso ---

    def vista(self, id_vista: int) -> VistaCamara:
        for v in self.vistas:
            if v.id == id_vista:
                return v
        logger.error(f"Vista {id_vista} no encontrada.")
        raise ErrorEntradaInvalida(f"Vista desconocida: {id_vista}.")

    @property
    def vistas_entrenamiento(self) -> List[VistaCamara]:
        return [v for v in self.vistas if v.entrenamiento]

    @property
    def vistas_retenidas(self) -> List[VistaCamara]:
        return [v for v in self.vistas if not v.entrenamiento]

    @property
    def num_gaussianas(self) -> int:
        return len(self.anclas) * self.config.k

    def centros_anclas(self) -> np.ndarray:
        if not self.anclas:
            return np.zeros((0, 3))
        return np.stack([a.centro for a in self.anclas])

    def puntos_particion(self) -> np.ndarray:
        return self.puntos if self.puntos is not None else self.centros_anclas()

    def nube_gaussianas(self) -> NubeGaussianas:
        return NubeGaussianas.desde_anclas(self.anclas)

    def gaussianas_de_anclas(self, ids_anclas) -> np.ndarray:
        """Índices planos de las Gaussianas hijas de las anclas dadas."""
        k = self.config.k
        ids = np.asarray(sorted(ids_anclas), dtype=np.int64)
        return (ids[:, None] * k + np.arange(k)[None, :]).reshape(-1)

    def copiar(self) -> 'PaqueteEscena':
        """Copia profunda; la configuración (inmutable) se comparte."""
        return PaqueteEscena(
            config=self.config,
            anclas=copy.deepcopy(self.anclas),
            vistas=copy.deepcopy(self.vistas),
            hrfn=self.hrfn.copiar(),
            puntos=None if self.puntos is None else self.puntos.copy(),
            metadatos=dict(self.metadatos),
        )
