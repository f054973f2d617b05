"""
Proyección EWA de primer orden de Gaussianas 3D a splats 2D en pantalla.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from model.escena.gaussiana import Gaussiana
from model.escena.nube_gaussianas import NubeGaussianas
from model.escena.vista_camara import VistaCamara

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

REGULARIZADOR_PIXEL = 0.3
SIGMAS_SOPORTE = 3.0


@dataclass(frozen=True)
class Splat2D:
    """
    Huella 2D de una Gaussiana: media y covarianza en píxeles, profundidad en cámara,
    índice de la Gaussiana de origen y la caja de soporte en píxeles (inclusiva).
    """
    media2d: np.ndarray
    cov2d: np.ndarray
    profundidad: float
    indice: int
    radio: float
    caja: Tuple[int, int, int, int]  # (x0, x1, y0, y1)

    @property
    def conica(self) -> np.ndarray:
        """Inversa de cov2d."""
        return np.linalg.inv(self.cov2d)


def _caja_soporte(media: np.ndarray, radio: float, ancho: int, alto: int) -> Optional[Tuple[int, int, int, int]]:
    """Píxeles con |p - media| <= radio en ambos ejes, recortados a la imagen."""
    x0 = max(int(np.ceil(media[0] - radio)), 0)
    x1 = min(int(np.floor(media[0] + radio)), ancho - 1)
    y0 = max(int(np.ceil(media[1] - radio)), 0)
    y1 = min(int(np.floor(media[1] + radio)), alto - 1)
    if x0 > x1 or y0 > y1:
        return None
    return x0, x1, y0, y1


def proyectar_nube(nube: NubeGaussianas, vista: VistaCamara, plano_cercano: float = 0.01) -> List[Splat2D]:
    """
    Proyecta todas las Gaussianas de la nube y devuelve los splats no descartados.

    cov2d = J W Σ Wᵀ Jᵀ + 0.3·I, con W la rotación mundo→cámara y J el jacobiano de
    la proyección en μ. Se descartan las Gaussianas con profundidad <= plano cercano
    y aquellas cuya caja de 3σ no contiene ningún centro de píxel.
    """
    if len(nube) == 0:
        return []
    p = vista.a_camara(nube.medias)
    z = p[:, 2]
    validas = np.flatnonzero(z > plano_cercano)
    if validas.size == 0:
        return []
    sigma = nube.covarianzas()[validas]
    pv, zv = p[validas], z[validas]
    J = np.zeros((validas.size, 2, 3))
    J[:, 0, 0] = vista.fx / zv
    J[:, 0, 2] = -vista.fx * pv[:, 0] / zv ** 2
    J[:, 1, 1] = vista.fy / zv
    J[:, 1, 2] = -vista.fy * pv[:, 1] / zv ** 2
    T = J @ vista.rotacion[None, :, :]
    cov = T @ sigma @ np.swapaxes(T, 1, 2) + REGULARIZADOR_PIXEL * np.eye(2)[None]
    cov = 0.5 * (cov + np.swapaxes(cov, 1, 2))
    medias = np.stack([vista.fx * pv[:, 0] / zv + vista.cx, vista.fy * pv[:, 1] / zv + vista.cy], axis=1)
    a, b, c = cov[:, 0, 0], cov[:, 0, 1], cov[:, 1, 1]
    lambda_max = 0.5 * (a + c) + np.sqrt((0.5 * (a - c)) ** 2 + b ** 2)
    radios = SIGMAS_SOPORTE * np.sqrt(lambda_max)

    splats = []
    for fila, indice in enumerate(validas):
        caja = _caja_soporte(medias[fila], radios[fila], vista.ancho, vista.alto)
        if caja is None:
            continue
        splats.append(Splat2D(medias[fila], cov[fila], float(zv[fila]), int(indice), float(radios[fila]), caja))
    logger.debug(f"Vista {vista.id}: {len(splats)} de {len(nube)} Gaussianas proyectadas.")
    return splats


def project_gaussian(g: Gaussiana, cam: VistaCamara, plano_cercano: float = 0.01) -> Optional[Splat2D]:
    """Proyección de una única Gaussiana; None si queda descartada."""
    nube = NubeGaussianas(g.media[None], g.rotacion[None], g.escala[None])
    splats = proyectar_nube(nube, cam, plano_cercano)
    return splats[0] if splats else None
