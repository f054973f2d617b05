"""
Transformada wavelet discreta de Haar 2D (un nivel y descomposición en paquetes
de m niveles), su inversa y su adjunta.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from model.errores import ErrorEntradaInvalida

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

ORDEN_BANDAS = ('LL', 'LH', 'HL', 'HH')


@dataclass
class ConjuntoSubbandas:
    """
    Las cuatro sub-bandas (C, H/2, W/2) de un nivel de Haar. `forma_original`
    guarda (H, W) antes del relleno para poder recortar en la inversa.
    """
    LL: np.ndarray
    LH: np.ndarray
    HL: np.ndarray
    HH: np.ndarray
    nivel: int = 1
    forma_original: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        formas = {b.shape for b in (self.LL, self.LH, self.HL, self.HH)}
        if len(formas) != 1:
            raise ErrorEntradaInvalida(f"Las sub-bandas deben compartir forma: {formas}")
        if self.nivel < 1:
            raise ErrorEntradaInvalida("El nivel de un conjunto de sub-bandas es >= 1.")
        if self.forma_original == (0, 0):
            self.forma_original = (2 * self.LL.shape[-2], 2 * self.LL.shape[-1])

    def apilar(self) -> np.ndarray:
        """Sub-bandas apiladas (4, C, h, w) en el orden LL, LH, HL, HH."""
        return np.stack([self.LL, self.LH, self.HL, self.HH])

    @classmethod
    def desde_pila(cls, pila: np.ndarray, forma_original: Tuple[int, int], nivel: int = 1) -> 'ConjuntoSubbandas':
        return cls(pila[0], pila[1], pila[2], pila[3], nivel, tuple(forma_original))


# ============================================================
# Un nivel
# ============================================================

def _rellenar_par(F: np.ndarray) -> np.ndarray:
    """Replica el borde para que H y W sean pares."""
    _, H, W = F.shape
    relleno = ((0, 0), (0, H % 2), (0, W % 2))
    if relleno[1][1] or relleno[2][1]:
        return np.pad(F, relleno, mode='edge')
    return F


def dwt1(F: np.ndarray) -> ConjuntoSubbandas:
    """
    DWT de Haar ortonormal de un nivel para un tensor C×H×W.

    Con a, b, c, d los píxeles de cada bloque 2×2 [[a,b],[c,d]]:
    LL = (a+b+c+d)/2, LH = (a+b-c-d)/2, HL = (a-b+c-d)/2, HH = (a-b-c+d)/2.
    Las dimensiones impares se rellenan replicando el borde.

    Raises:
        ErrorEntradaInvalida: Si la entrada no es 3D o tiene tamaño cero.
    """
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 3 or F.size == 0:
        logger.error(f"dwt1 recibió un tensor de forma {F.shape}.")
        raise ErrorEntradaInvalida("dwt1 necesita un tensor C×H×W no vacío.")
    forma = (F.shape[1], F.shape[2])
    P = _rellenar_par(F)
    a = P[:, 0::2, 0::2]
    b = P[:, 0::2, 1::2]
    c = P[:, 1::2, 0::2]
    d = P[:, 1::2, 1::2]
    return ConjuntoSubbandas(
        LL=(a + b + c + d) / 2.0,
        LH=(a + b - c - d) / 2.0,
        HL=(a - b + c - d) / 2.0,
        HH=(a - b - c + d) / 2.0,
        nivel=1,
        forma_original=forma,
    )


def _sintetizar(bandas: ConjuntoSubbandas) -> np.ndarray:
    """Inversa sin recorte: devuelve el tensor de tamaño par."""
    LL, LH, HL, HH = bandas.LL, bandas.LH, bandas.HL, bandas.HH
    C, h, w = LL.shape
    F = np.empty((C, 2 * h, 2 * w))
    F[:, 0::2, 0::2] = (LL + LH + HL + HH) / 2.0
    F[:, 0::2, 1::2] = (LL + LH - HL - HH) / 2.0
    F[:, 1::2, 0::2] = (LL - LH + HL - HH) / 2.0
    F[:, 1::2, 1::2] = (LL - LH - HL + HH) / 2.0
    return F


def idwt1(bandas: ConjuntoSubbandas) -> np.ndarray:
    """Inversa de dwt1; recorta el relleno de las dimensiones impares."""
    H, W = bandas.forma_original
    return _sintetizar(bandas)[:, :H, :W]


def dwt1_adjunta(bandas: ConjuntoSubbandas) -> np.ndarray:
    """
    Adjunta de dwt1 (para retropropagar). Sin relleno coincide con idwt1; con
    relleno, la fila o columna replicada se acumula sobre la última original.
    """
    H, W = bandas.forma_original
    G = _sintetizar(bandas)
    if G.shape[2] > W:
        G[:, :, W - 1] += G[:, :, W]
        G = G[:, :, :W]
    if G.shape[1] > H:
        G[:, H - 1, :] += G[:, H, :]
        G = G[:, :H, :]
    return G


# ============================================================
# Paquetes de m niveles
# ============================================================

def formas_por_nivel(H: int, W: int, niveles: int) -> List[Tuple[int, int]]:
    """Tamaños espaciales de los sub-mapas en cada nivel 0..m."""
    formas = [(H, W)]
    for _ in range(niveles):
        h, w = formas[-1]
        formas.append(((h + 1) // 2, (w + 1) // 2))
    return formas


def descomposicion_paquetes(F: np.ndarray, niveles: int) -> np.ndarray:
    """
    Descomposición completa en paquetes: en cada nivel se vuelve a transformar
    cada sub-banda, lo que da 4^m sub-mapas. El sub-mapa j del nivel m hereda
    de su padre j // 4 y ocupa la banda j % 4.

    Returns:
        Array (4^m, C, h_m, w_m). Para m = 0, F con un eje inicial de tamaño 1.
    """
    actual = np.asarray(F, dtype=np.float64)[None]
    for _ in range(niveles):
        hijos = [dwt1(sub).apilar() for sub in actual]
        actual = np.concatenate(hijos, axis=0)
    return actual


def descomposicion_paquetes_adjunta(G: np.ndarray, forma: Tuple[int, int, int], niveles: int) -> np.ndarray:
    """Adjunta de descomposicion_paquetes: de (4^m, C, h_m, w_m) a (C, H, W)."""
    _, H, W = forma
    formas = formas_por_nivel(H, W, niveles)
    actual = np.asarray(G, dtype=np.float64)
    for nivel in range(niveles, 0, -1):
        forma_padre = formas[nivel - 1]
        padres = []
        for j in range(actual.shape[0] // 4):
            bandas = ConjuntoSubbandas.desde_pila(actual[4 * j:4 * j + 4], forma_padre, nivel)
            padres.append(dwt1_adjunta(bandas))
        actual = np.stack(padres)
    return actual[0]
