"""
Optimizador de momentos adaptativos (Adam) sobre tensores numpy con nombre, con
tasas por familia que decaen exponencialmente y máscaras de filas opcionales.
"""

import logging
from typing import Dict, Optional

import numpy as np

from model.entrenamiento.configuracion_entrenamiento import ConfiguracionEntrenamiento, familia_de_tensor

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


class OptimizadorAdam:
    """
    Actualiza in situ los tensores de un diccionario de parámetros.

    Cada fila del primer eje lleva su propio contador de pasos para la
    corrección de sesgo. Con una máscara de filas solo se actualizan (momentos
    y contadores incluidos) las filas seleccionadas, de modo que una fila que
    vuelve tras varias iteraciones fuera del bloque alojado retoma su corrección
    donde la dejó.
    """

    def __init__(self, config: ConfiguracionEntrenamiento):
        self.config = config
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        self.pasos: Dict[str, np.ndarray] = {}

    def tasa(self, nombre: str, iteracion: int) -> float:
        return self.config.tasa(familia_de_tensor(nombre), iteracion)

    @staticmethod
    def _por_fila(valores: np.ndarray, ndim: int) -> np.ndarray:
        """Da a un vector por fila la forma que difunde sobre el resto de ejes."""
        return valores.reshape(valores.shape + (1,) * max(ndim - 1, 0))

    def paso(self, parametros: Dict[str, np.ndarray], gradientes: Dict[str, np.ndarray], iteracion: int,
             mascaras_filas: Optional[Dict[str, np.ndarray]] = None):
        """
        Aplica un paso a cada tensor que tenga gradiente.

        Args:
            parametros: Tensores a modificar in situ.
            gradientes: Gradientes con los mismos nombres (los ausentes no se tocan).
            iteracion: Iteración global, para el decaimiento de la tasa.
            mascaras_filas: {nombre: máscara bool del primer eje}.
        """
        mascaras_filas = mascaras_filas or {}
        for nombre, gradiente in gradientes.items():
            tasa = self.tasa(nombre, iteracion)
            if tasa == 0.0:
                continue
            tensor = parametros[nombre]
            if nombre not in self.m:
                self.m[nombre] = np.zeros_like(tensor)
                self.v[nombre] = np.zeros_like(tensor)
                self.pasos[nombre] = np.zeros(tensor.shape[:1], dtype=np.int64)
            m, v, pasos = self.m[nombre], self.v[nombre], self.pasos[nombre]
            filas = mascaras_filas.get(nombre)
            if filas is None:
                pasos += 1
                t = self._por_fila(pasos, tensor.ndim)
                m *= BETA1
                m += (1.0 - BETA1) * gradiente
                v *= BETA2
                v += (1.0 - BETA2) * gradiente * gradiente
                m_hat = m / (1.0 - BETA1 ** t)
                v_hat = v / (1.0 - BETA2 ** t)
                tensor -= tasa * m_hat / (np.sqrt(v_hat) + EPSILON)
            else:
                pasos[filas] += 1
                t = self._por_fila(pasos[filas], tensor.ndim)
                g = gradiente[filas]
                m[filas] = BETA1 * m[filas] + (1.0 - BETA1) * g
                v[filas] = BETA2 * v[filas] + (1.0 - BETA2) * g * g
                m_hat = m[filas] / (1.0 - BETA1 ** t)
                v_hat = v[filas] / (1.0 - BETA2 ** t)
                tensor[filas] -= tasa * m_hat / (np.sqrt(v_hat) + EPSILON)
