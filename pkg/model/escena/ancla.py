"""
Define la clase Ancla: un punto centrado en un vóxel que genera k Gaussianas
mediante offsets aprendibles y guarda los parámetros de muestreo micro-macro.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorEntradaInvalida
from model.escena.gaussiana import Gaussiana, normalizar_cuaterniones

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

OPACIDAD_INICIAL = 0.5


@dataclass
class Ancla:
    """
    Ancla estilo Scaffold. Además de los campos propios del ancla (centro, escala
    del vóxel, offsets, f_v, nc, bc, pesos ω) guarda los atributos por Gaussiana
    que el rasterizador necesita: escalas, rotaciones y opacidades de sus k hijas.

    omega_n[m-1] y omega_b[m-1] son los pesos de sub-banda del nivel m (4^m entradas).
    """
    centro: np.ndarray
    escala_voxel: np.ndarray
    offsets: np.ndarray
    f_v: np.ndarray
    nc: np.ndarray
    bc: np.ndarray
    omega_n: List[np.ndarray] = field(default_factory=list)
    omega_b: List[np.ndarray] = field(default_factory=list)
    escalas: Optional[np.ndarray] = None
    rotaciones: Optional[np.ndarray] = None
    opacidades: Optional[np.ndarray] = None

    def __post_init__(self):
        self.centro = np.asarray(self.centro, dtype=np.float64).reshape(3)
        self.escala_voxel = np.asarray(self.escala_voxel, dtype=np.float64).reshape(3)
        self.offsets = np.asarray(self.offsets, dtype=np.float64)
        k = self.offsets.shape[0]
        self.f_v = np.asarray(self.f_v, dtype=np.float64).reshape(-1)
        self.nc = np.asarray(self.nc, dtype=np.float64)
        self.bc = np.asarray(self.bc, dtype=np.float64)
        self.omega_n = [np.asarray(w, dtype=np.float64).reshape(-1) for w in self.omega_n]
        self.omega_b = [np.asarray(w, dtype=np.float64).reshape(-1) for w in self.omega_b]
        if self.escalas is None:
            self.escalas = np.tile(self.escala_voxel * 0.5, (k, 1))
        if self.rotaciones is None:
            self.rotaciones = np.tile(np.array([1.0, 0.0, 0.0, 0.0]), (k, 1))
        if self.opacidades is None:
            self.opacidades = np.full(k, OPACIDAD_INICIAL)
        self.escalas = np.asarray(self.escalas, dtype=np.float64)
        self.rotaciones = normalizar_cuaterniones(self.rotaciones)
        self.opacidades = np.asarray(self.opacidades, dtype=np.float64).reshape(-1)

    @property
    def k(self) -> int:
        return self.offsets.shape[0]

    def validar(self, config: ConfiguracionEscena):
        """
        Comprueba que las formas del ancla coinciden con la configuración.

        Raises:
            ErrorEntradaInvalida: Si alguna forma no cuadra.
        """
        esperadas = {
            'offsets': (self.offsets.shape, (config.k, 3)),
            'f_v': (self.f_v.shape, (config.n_v,)),
            'nc': (self.nc.shape, (config.k_s, 2)),
            'bc': (self.bc.shape, (config.k_s, 2)),
            'escalas': (self.escalas.shape, (config.k, 3)),
            'rotaciones': (self.rotaciones.shape, (config.k, 4)),
            'opacidades': (self.opacidades.shape, (config.k,)),
        }
        for nombre, (forma, esperada) in esperadas.items():
            if forma != esperada:
                logger.error(f"Ancla mal formada: '{nombre}' tiene forma {forma}, se esperaba {esperada}.")
                raise ErrorEntradaInvalida(f"Forma de '{nombre}' incorrecta: {forma} != {esperada}.")
        if len(self.omega_n) != config.M or len(self.omega_b) != config.M:
            raise ErrorEntradaInvalida(f"Se esperaban {config.M} niveles de pesos ω.")
        for m in range(1, config.M + 1):
            for pesos in (self.omega_n[m - 1], self.omega_b[m - 1]):
                if pesos.shape != (4 ** m,):
                    logger.error(f"Pesos ω del nivel {m} con forma {pesos.shape}.")
                    raise ErrorEntradaInvalida(f"Los pesos ω del nivel {m} deben tener 4^{m} entradas.")

    @classmethod
    def crear(cls, centro: np.ndarray, config: ConfiguracionEscena,
              tamano_voxel: Optional[float] = None) -> 'Ancla':
        """
        Crea un ancla con la inicialización por defecto: offsets nulos, l_v igual al
        tamaño de vóxel, f_v nulo, nc = 0, bc = 1 y pesos ω uniformes 1/4^m.
        """
        lado = config.tamano_voxel if tamano_voxel is None else tamano_voxel
        return cls(
            centro=centro,
            escala_voxel=np.full(3, lado),
            offsets=np.zeros((config.k, 3)),
            f_v=np.zeros(config.n_v),
            nc=np.zeros((config.k_s, 2)),
            bc=np.ones((config.k_s, 2)),
            omega_n=[np.full(4 ** m, 1.0 / 4 ** m) for m in range(1, config.M + 1)],
            omega_b=[np.full(4 ** m, 1.0 / 4 ** m) for m in range(1, config.M + 1)],
        )

    def posiciones_gaussianas(self) -> np.ndarray:
        return anchor_to_gaussians(self)

    def gaussianas(self, colores: Optional[np.ndarray] = None) -> List[Gaussiana]:
        """Materializa las k Gaussianas hijas (colores opcionales, negro por defecto)."""
        posiciones = self.posiciones_gaussianas()
        if colores is None:
            colores = np.zeros((self.k, 3))
        return [Gaussiana(posiciones[j], self.rotaciones[j], self.escalas[j],
                          float(np.clip(self.opacidades[j], 0.0, 1.0)), colores[j])
                for j in range(self.k)]


def anchor_to_gaussians(a: Ancla, config: Optional[ConfiguracionEscena] = None) -> np.ndarray:
    """
    Posiciones de las k Gaussianas del ancla: x_i + O_v[j] ⊙ l_v.

    Returns:
        Array (k, 3).
    """
    if config is not None:
        a.validar(config)
    return a.centro[None, :] + a.offsets * a.escala_voxel[None, :]
