"""
Estadísticas de visibilidad punto-cámara para el particionado guiado por puntos.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Sequence

import numpy as np

from model.errores import ErrorConfiguracion
from model.escena.vista_camara import VistaCamara

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)


@dataclass
class TablaVisibilidad:
    """
    V(p_i) para cada punto, sus cuentas, la media c̄ y el umbral τ = κ·c̄.
    """
    visibles: List[FrozenSet[int]]
    conteos: np.ndarray
    media: float
    kappa: float
    umbral: float

    def camaras_que_ven(self, punto: int) -> FrozenSet[int]:
        return self.visibles[punto]

    def camaras(self) -> List[int]:
        todas = set()
        for conjunto in self.visibles:
            todas |= conjunto
        return sorted(todas)


def visibility_stats(points: np.ndarray, cameras: Sequence[VistaCamara], kappa: float = 0.5,
                     plano_cercano: float = 0.01) -> TablaVisibilidad:
    """
    Un punto es visible desde una cámara si su profundidad supera el plano cercano
    y su proyección cae dentro de la imagen (sin test de oclusión).

    Raises:
        ErrorConfiguracion: Si κ no está en (0, 1).
    """
    if not 0.0 < kappa < 1.0:
        logger.error(f"kappa fuera de (0,1): {kappa}")
        raise ErrorConfiguracion("kappa debe estar en (0, 1).")
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    conjuntos: List[set] = [set() for _ in range(points.shape[0])]
    for camara in cameras:
        uv, z = camara.proyectar(points)
        vistos = (z > plano_cercano) & camara.dentro_de_imagen(uv)
        for indice in np.flatnonzero(vistos):
            conjuntos[indice].add(camara.id)
    conteos = np.array([len(c) for c in conjuntos], dtype=np.int64)
    media = float(conteos.mean()) if conteos.size else 0.0
    tabla = TablaVisibilidad([frozenset(c) for c in conjuntos], conteos, media, kappa, kappa * media)
    logger.info(f"Visibilidad: {points.shape[0]} puntos, c̄={media:.3f}, τ={tabla.umbral:.3f}")
    return tabla


def supervision(puntos: Sequence[int], camaras: Sequence[int], tabla: TablaVisibilidad) -> Dict[int, int]:
    """N_vis(p) = |V(p) ∩ cámaras| para cada punto indicado."""
    asignadas = set(camaras)
    return {p: len(tabla.visibles[p] & asignadas) for p in puntos}
