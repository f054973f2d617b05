"""
Define la configuración global de hiperparámetros compartida por toda la escena.
"""

import logging
import os
from dataclasses import asdict, dataclass, replace
from typing import Any, ClassVar, Dict, Optional, Tuple

from dotenv import load_dotenv

from model.errores import ErrorConfiguracion

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

AnchosHRFN = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class ConfiguracionEscena:
    """
    Agrupa todos los hiperparámetros de una escena: dimensiones de las
    características, muestreo micro-macro, pesos de la pérdida y parámetros
    del particionado por bloques.

    Los valores por defecto siguen la configuración de referencia del método
    (k=10, k_s=1, M=1, n_v=48, n_r=32, n_g=16, pesos λ) y elecciones
    documentadas en DESIGN.md para el resto (ṙ, Ṙ_max, κ, η, L_pe, etc.).
    """

    # --- Estructura de anclas ---
    k: int = 10                       # Gaussianas por vóxel
    k_s: int = 1                      # Muestras por sección de frustum
    M: int = 1                        # Nivel máximo de DWT
    n_v: int = 48                     # Dimensión de la característica intrínseca f_v
    n_r: int = 32                     # Dimensión de la característica refinada f_r
    n_g: int = 16                     # Dimensión de la característica global f_g
    tamano_voxel: float = 0.5         # Inicialización de l_v

    # --- Muestreo micro-macro (píxeles del mapa de características) ---
    radio_estrecho: float = 2.0       # ṙ
    radio_amplio_max: float = 32.0    # Ṙ_max
    paso_mapa: int = 4                # H^F = H / paso_mapa

    # --- Red de fusión ---
    frecuencias_pe: int = 4           # L_pe
    anchos_hrfn: AnchosHRFN = ((128, 96), (96, 64), (48, 48), (48,))

    # --- Pérdida ---
    lambda_ssim: float = 0.2
    lambda_1: float = 0.8
    lambda_proj: float = 0.01
    lambda_vol: float = 0.01

    # --- Particionado y rotación ---
    kappa: float = 0.5
    eta: float = 0.01
    n_iter_rotacion: int = 100

    # --- Varios ---
    plano_cercano: float = 0.01
    semilla: int = 0

    # Overrides de cada preset sobre los valores por defecto
    PARAMETROS_POR_PRESET: ClassVar[Dict[str, Dict[str, Any]]] = {
        'completo': {},
        'tiny': {'n_iter_rotacion': 50, 'radio_amplio_max': 24.0},
        'medium': {'n_iter_rotacion': 100, 'radio_amplio_max': 32.0},
        'toy': {
            'k': 2, 'k_s': 2, 'n_v': 4, 'n_r': 8, 'n_g': 3, 'frecuencias_pe': 2,
            'paso_mapa': 2, 'radio_amplio_max': 12.0,
            'anchos_hrfn': ((8, 6), (6, 5), (5, 5), (5,)),
        },
    }
    DEFAULT_PRESET: ClassVar[str] = 'completo'

    def __post_init__(self):
        """Valida la coherencia de los hiperparámetros."""
        enteros_positivos = {'k': self.k, 'k_s': self.k_s, 'n_v': self.n_v, 'n_r': self.n_r,
                             'n_g': self.n_g, 'paso_mapa': self.paso_mapa,
                             'n_iter_rotacion': self.n_iter_rotacion}
        for nombre, valor in enteros_positivos.items():
            if int(valor) < 1:
                self._fallar(f"'{nombre}' debe ser >= 1 (recibido {valor}).")
        if self.M < 0:
            self._fallar(f"M debe ser >= 0 (recibido {self.M}).")
        if self.n_r % (2 * self.M + 2) != 0:
            self._fallar(f"n_r={self.n_r} no es divisible entre 2M+2={2 * self.M + 2}.")
        if self.frecuencias_pe < 0:
            self._fallar("frecuencias_pe no puede ser negativo.")
        if not 0.0 < self.kappa < 1.0:
            self._fallar(f"kappa debe estar en (0,1) (recibido {self.kappa}).")
        if self.radio_estrecho <= 0 or self.radio_amplio_max <= 0:
            self._fallar("Los radios de frustum deben ser positivos.")
        if self.tamano_voxel <= 0 or self.plano_cercano <= 0:
            self._fallar("tamano_voxel y plano_cercano deben ser positivos.")
        if min(self.lambda_ssim, self.lambda_1, self.lambda_proj, self.lambda_vol) < 0:
            self._fallar("Los pesos λ de la pérdida deben ser >= 0.")
        if len(self.anchos_hrfn) != 4 or any(len(etapa) == 0 for etapa in self.anchos_hrfn):
            self._fallar("anchos_hrfn debe describir 4 etapas no vacías.")

    @staticmethod
    def _fallar(mensaje: str):
        logger.error(mensaje)
        raise ErrorConfiguracion(mensaje)

    # --- Construcción ---

    @classmethod
    def desde_preset(cls, nombre: str, **overrides: Any) -> 'ConfiguracionEscena':
        """
        Crea una configuración a partir de un preset con nombre.

        Args:
            nombre: 'completo', 'tiny', 'medium' o 'toy'. Un nombre desconocido
                    usa el preset por defecto (con aviso en el log).
            **overrides: Campos a sobrescribir después de aplicar el preset.
        """
        if nombre not in cls.PARAMETROS_POR_PRESET:
            logger.warning(f"Preset '{nombre}' no reconocido. Usando '{cls.DEFAULT_PRESET}'.")
            nombre = cls.DEFAULT_PRESET
        parametros = dict(cls.PARAMETROS_POR_PRESET[nombre])
        parametros.update(overrides)
        config = cls(**parametros)
        logger.debug(f"ConfiguracionEscena creada desde preset '{nombre}': {config}")
        return config

    @classmethod
    def desde_entorno(cls, ruta_env: Optional[str] = None) -> 'ConfiguracionEscena':
        """
        Carga variables SPLAT_* (opcionalmente desde un fichero .env) y construye
        la configuración. Variables reconocidas: SPLAT_PRESET, SPLAT_SEMILLA,
        SPLAT_KAPPA, SPLAT_ETA, SPLAT_N_ITER.
        """
        load_dotenv(ruta_env)
        overrides: Dict[str, Any] = {}
        conversiones = {
            'SPLAT_SEMILLA': ('semilla', int),
            'SPLAT_KAPPA': ('kappa', float),
            'SPLAT_ETA': ('eta', float),
            'SPLAT_N_ITER': ('n_iter_rotacion', int),
        }
        for variable, (campo, tipo) in conversiones.items():
            valor = os.getenv(variable)
            if valor is None:
                continue
            try:
                overrides[campo] = tipo(valor)
            except ValueError:
                cls._fallar(f"Valor no válido para {variable}: '{valor}'.")
        return cls.desde_preset(os.getenv('SPLAT_PRESET', cls.DEFAULT_PRESET), **overrides)

    def con_cambios(self, **cambios: Any) -> 'ConfiguracionEscena':
        """Devuelve una copia con los campos indicados cambiados (y revalidada)."""
        return replace(self, **cambios)

    # --- Serialización ---

    def a_diccionario(self) -> Dict[str, Any]:
        datos = asdict(self)
        datos['anchos_hrfn'] = [list(etapa) for etapa in self.anchos_hrfn]
        return datos

    @classmethod
    def desde_diccionario(cls, datos: Dict[str, Any]) -> 'ConfiguracionEscena':
        datos = dict(datos)
        if 'anchos_hrfn' in datos:
            datos['anchos_hrfn'] = tuple(tuple(int(a) for a in etapa) for etapa in datos['anchos_hrfn'])
        return cls(**datos)

    # --- Cantidades derivadas ---

    @property
    def canales_por_mapa(self) -> int:
        """Canales de cada uno de los 2M+2 mapas en que se divide F^MAP."""
        return self.n_r // (2 * self.M + 2)

    @property
    def dimension_pe(self) -> int:
        """Longitud de γ(x) = 6·L_pe."""
        return 6 * self.frecuencias_pe


