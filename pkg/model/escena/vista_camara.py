"""
Define la clase VistaCamara: intrínsecos, extrínsecos, imagen de referencia y
tensores de apariencia por imagen (f_g y el mapa de características F^MAP).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorEntradaInvalida, ErrorGeometriaDegenerada

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

TOLERANCIA_ORTONORMAL = 1e-9
ESCALA_APARIENCIA_INICIAL = 0.01


@dataclass
class VistaCamara:
    """
    Una cámara pinhole con convención OpenCV (x derecha, y abajo, z hacia delante).

    La rotación es mundo→cámara: p_cam = R·p_mundo + t. El centro de la cámara es
    -Rᵀt. El píxel (x, y) tiene su centro en coordenadas enteras.
    """
    id: int
    rotacion: np.ndarray
    traslacion: np.ndarray
    fx: float
    fy: float
    cx: float
    cy: float
    ancho: int
    alto: int
    f_g: Optional[np.ndarray] = None
    mapa: Optional[np.ndarray] = None
    imagen_gt: Optional[np.ndarray] = None
    nombre_imagen: Optional[str] = None
    entrenamiento: bool = True

    def __post_init__(self):
        self.id = int(self.id)
        self.rotacion = np.asarray(self.rotacion, dtype=np.float64).reshape(3, 3)
        self.traslacion = np.asarray(self.traslacion, dtype=np.float64).reshape(3)
        self.ancho = int(self.ancho)
        self.alto = int(self.alto)
        error = np.abs(self.rotacion @ self.rotacion.T - np.eye(3)).max()
        if error > TOLERANCIA_ORTONORMAL:
            logger.error(f"Vista {self.id}: rotación no ortonormal (error {error:.3e}).")
            raise ErrorEntradaInvalida(f"La rotación de la vista {self.id} no es ortonormal.")
        if self.ancho < 1 or self.alto < 1:
            raise ErrorEntradaInvalida(f"Tamaño de imagen no válido en la vista {self.id}.")
        if self.imagen_gt is not None:
            self.imagen_gt = np.asarray(self.imagen_gt, dtype=np.float64)
            if self.imagen_gt.shape != (self.alto, self.ancho, 3):
                logger.error(f"Vista {self.id}: imagen {self.imagen_gt.shape} para {self.alto}x{self.ancho}.")
                raise ErrorEntradaInvalida(f"La imagen de la vista {self.id} no coincide con su tamaño.")

    # --- Geometría ---

    @property
    def centro(self) -> np.ndarray:
        """Centro óptico x_c en coordenadas de mundo."""
        return -self.rotacion.T @ self.traslacion

    def a_camara(self, puntos: np.ndarray) -> np.ndarray:
        """Transforma puntos (n,3) de mundo a cámara."""
        return np.asarray(puntos, dtype=np.float64) @ self.rotacion.T + self.traslacion

    def proyectar(self, puntos: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Proyecta puntos (n,3) a píxeles de imagen.

        Returns:
            (uv (n,2), profundidad (n,)). Los puntos con profundidad <= 0 reciben uv = 0.
        """
        p = self.a_camara(np.atleast_2d(puntos))
        z = p[:, 2]
        z_seguro = np.where(z > 1e-12, z, 1.0)
        uv = np.stack([self.fx * p[:, 0] / z_seguro + self.cx,
                       self.fy * p[:, 1] / z_seguro + self.cy], axis=1)
        uv[z <= 1e-12] = 0.0
        return uv, z

    def proyectar_punto(self, x: np.ndarray, plano_cercano: float = 0.01) -> Optional[np.ndarray]:
        """Proyección de un único punto, o None si queda detrás del plano cercano."""
        uv, z = self.proyectar(np.asarray(x, dtype=np.float64).reshape(1, 3))
        if z[0] <= plano_cercano:
            return None
        return uv[0]

    def dentro_de_imagen(self, uv: np.ndarray) -> np.ndarray:
        uv = np.atleast_2d(uv)
        return (uv[:, 0] >= 0) & (uv[:, 0] < self.ancho) & (uv[:, 1] >= 0) & (uv[:, 1] < self.alto)

    @property
    def escala_mapa(self) -> np.ndarray:
        """Factor (W^F/W, H^F/H) que lleva píxeles de imagen a píxeles del mapa."""
        if self.mapa is None:
            raise ErrorEntradaInvalida(f"La vista {self.id} no tiene mapa de características.")
        return np.array([self.mapa.shape[2] / self.ancho, self.mapa.shape[1] / self.alto])

    def direccion_desde_camara(self, x: np.ndarray) -> np.ndarray:
        """d_ic = (x - x_c)/‖x - x_c‖ para uno o varios puntos."""
        d = np.atleast_2d(x) - self.centro[None, :]
        normas = np.linalg.norm(d, axis=1, keepdims=True)
        if np.any(normas <= 0.0):
            logger.error(f"Punto coincidente con el centro de la vista {self.id}.")
            raise ErrorGeometriaDegenerada("Punto y centro de cámara coincidentes.")
        return d / normas

    # --- Apariencia ---

    def validar(self, config: ConfiguracionEscena):
        """Comprueba f_g y F^MAP contra la configuración."""
        if self.f_g is None or self.f_g.shape != (config.n_g,):
            raise ErrorEntradaInvalida(f"f_g de la vista {self.id} debe tener longitud {config.n_g}.")
        if self.mapa is None or self.mapa.ndim != 3 or self.mapa.shape[0] != config.n_r:
            raise ErrorEntradaInvalida(f"F^MAP de la vista {self.id} debe tener {config.n_r} canales.")
        minimo = 2 ** config.M
        if self.mapa.shape[1] < minimo or self.mapa.shape[2] < minimo:
            logger.error(f"Vista {self.id}: mapa {self.mapa.shape[1:]} menor que 2^M={minimo}.")
            raise ErrorEntradaInvalida(f"El mapa de la vista {self.id} es demasiado pequeño para M={config.M}.")

    def inicializar_apariencia(self, config: ConfiguracionEscena, rng: np.random.Generator):
        """f_g y F^MAP desde una normal estándar con semilla, escalada por 0.01."""
        alto_mapa = max(self.alto // config.paso_mapa, 2 ** config.M)
        ancho_mapa = max(self.ancho // config.paso_mapa, 2 ** config.M)
        self.f_g = ESCALA_APARIENCIA_INICIAL * rng.standard_normal(config.n_g)
        self.mapa = ESCALA_APARIENCIA_INICIAL * rng.standard_normal((config.n_r, alto_mapa, ancho_mapa))

    @classmethod
    def mirando_a(cls, id: int, centro: np.ndarray, objetivo: np.ndarray, focal: float,
                  ancho: int, alto: int, arriba: Optional[np.ndarray] = None, **kwargs) -> 'VistaCamara':
        """
        Construye una cámara situada en `centro` que mira hacia `objetivo`.
        `arriba` es la dirección vertical del mundo (por defecto +z).
        """
        centro = np.asarray(centro, dtype=np.float64)
        adelante = np.asarray(objetivo, dtype=np.float64) - centro
        if np.linalg.norm(adelante) == 0:
            raise ErrorGeometriaDegenerada("La cámara y el objetivo coinciden.")
        adelante /= np.linalg.norm(adelante)
        arriba = np.array([0.0, 0.0, 1.0]) if arriba is None else np.asarray(arriba, dtype=np.float64)
        derecha = np.cross(adelante, arriba)
        if np.linalg.norm(derecha) < 1e-9:
            raise ErrorGeometriaDegenerada("La dirección de vista es paralela al vector 'arriba'.")
        derecha /= np.linalg.norm(derecha)
        abajo = np.cross(adelante, derecha)
        R = np.stack([derecha, abajo, adelante])
        # Reortogonalización para cumplir la tolerancia de 1e-9
        U, _, Vt = np.linalg.svd(R)
        R = U @ Vt
        return cls(id=id, rotacion=R, traslacion=-R @ centro, fx=focal, fy=focal,
                   cx=(ancho - 1) / 2.0, cy=(alto - 1) / 2.0, ancho=ancho, alto=alto, **kwargs)
