"""
División del mapa de características F^MAP en 2M+2 mapas y construcción de sus
descomposiciones wavelet por nivel.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from model.errores import ErrorConfiguracion, ErrorEntradaInvalida
from model.wavelet.transformada_haar import (
    ConjuntoSubbandas,
    descomposicion_paquetes,
    descomposicion_paquetes_adjunta,
)

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)


@dataclass
class PiramideCaracteristicas:
    """
    Los 2M+2 mapas base (C, H^F, W^F) y, para cada nivel m ≥ 1, los 4^m sub-mapas
    de los mapas 2m (estrecho) y 2m+1 (amplio), con índices desde 0.
    """
    mapas_base: List[np.ndarray]
    M: int
    paquetes_estrecho: Dict[int, np.ndarray] = field(default_factory=dict)
    paquetes_amplio: Dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def canales(self) -> int:
        return self.mapas_base[0].shape[0]

    @property
    def forma_mapa(self) -> Tuple[int, int, int]:
        return self.mapas_base[0].shape

    def subbandas(self, m: int, amplio: bool = False) -> Optional[ConjuntoSubbandas]:
        """Las cuatro bandas de primer nivel cuando m = 1 (None en otro caso)."""
        if m != 1:
            return None
        pila = (self.paquetes_amplio if amplio else self.paquetes_estrecho)[1]
        return ConjuntoSubbandas.desde_pila(pila, self.forma_mapa[1:], nivel=1)

    def mapa_de_nivel(self, m: int, amplio: bool) -> np.ndarray:
        """
        Sub-mapas muestreables del nivel m como pila (4^m, C, h, w). En el nivel 0
        es el mapa base 0 o 1 con un eje inicial de tamaño 1.
        """
        if m == 0:
            return self.mapas_base[1 if amplio else 0][None]
        return (self.paquetes_amplio if amplio else self.paquetes_estrecho)[m]

    def gradiente_mapa(self, gradientes_niveles: Dict[Tuple[int, bool], np.ndarray]) -> np.ndarray:
        """
        Lleva gradientes respecto a los sub-mapas de cada nivel de vuelta a F^MAP.

        Args:
            gradientes_niveles: {(m, amplio): (4^m, C, h_m, w_m)}; las claves ausentes
                                cuentan como gradiente nulo.

        Returns:
            Gradiente (n_r, H^F, W^F).
        """
        forma = self.forma_mapa
        trozos = []
        for m in range(self.M + 1):
            for amplio in (False, True):
                g = gradientes_niveles.get((m, amplio))
                if g is None:
                    trozos.append(np.zeros(forma))
                elif m == 0:
                    trozos.append(g[0])
                else:
                    trozos.append(descomposicion_paquetes_adjunta(g, forma, m))
        return np.concatenate(trozos, axis=0)


def split_feature_map(F_map: np.ndarray, M: int) -> PiramideCaracteristicas:
    """
    Divide F^MAP en 2M+2 trozos contiguos de n_r/(2M+2) canales. Los mapas 2m y
    2m+1 (m ≥ 1) reciben una DWT de paquetes de m niveles (4^m sub-mapas).

    Raises:
        ErrorConfiguracion: Si n_r no es divisible entre 2M+2.
        ErrorEntradaInvalida: Si el mapa es menor que 2^M.
    """
    F_map = np.asarray(F_map, dtype=np.float64)
    if F_map.ndim != 3:
        raise ErrorEntradaInvalida(f"F^MAP debe ser n_r×H×W, recibido {F_map.shape}.")
    n_r = F_map.shape[0]
    num_mapas = 2 * M + 2
    if M < 0 or n_r % num_mapas != 0:
        logger.error(f"n_r={n_r} no divisible entre 2M+2={num_mapas}.")
        raise ErrorConfiguracion(f"n_r={n_r} no es divisible entre 2M+2={num_mapas}.")
    if min(F_map.shape[1:]) < 2 ** M:
        logger.error(f"Mapa {F_map.shape[1:]} demasiado pequeño para M={M}.")
        raise ErrorEntradaInvalida(f"H^F y W^F deben ser >= 2^M = {2 ** M}.")
    canales = n_r // num_mapas
    mapas = [F_map[i * canales:(i + 1) * canales] for i in range(num_mapas)]
    piramide = PiramideCaracteristicas(mapas_base=mapas, M=M)
    for m in range(1, M + 1):
        piramide.paquetes_estrecho[m] = descomposicion_paquetes(mapas[2 * m], m)
        piramide.paquetes_amplio[m] = descomposicion_paquetes(mapas[2 * m + 1], m)
    return piramide
