"""
Capas elementales de la red de fusión con forward y backward escritos a mano.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass
class CapaLineal:
    """
    Capa y = x·W + b con W de forma (entrada, salida).

    No guarda estado entre llamadas: forward devuelve la caché que backward necesita,
    de modo que la misma capa puede evaluarse varias veces antes de retropropagar.
    """
    pesos: np.ndarray
    sesgo: np.ndarray

    @property
    def entrada(self) -> int:
        return self.pesos.shape[0]

    @property
    def salida(self) -> int:
        return self.pesos.shape[1]

    @classmethod
    def inicializar(cls, entrada: int, salida: int, rng: np.random.Generator) -> 'CapaLineal':
        """Pesos uniformes de tipo He (límite √(6/fan_in)) y sesgos nulos."""
        limite = np.sqrt(6.0 / entrada)
        return cls(rng.uniform(-limite, limite, size=(entrada, salida)), np.zeros(salida))

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return x @ self.pesos + self.sesgo, x

    def backward(self, x: np.ndarray, dy: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Devuelve (dL/dx, dL/dW, dL/db) para una caché x y un gradiente dy por lotes."""
        return dy @ self.pesos.T, x.T @ dy, dy.sum(axis=0)

    def copiar(self) -> 'CapaLineal':
        return CapaLineal(self.pesos.copy(), self.sesgo.copy())


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def relu_backward(z: np.ndarray, dy: np.ndarray) -> np.ndarray:
    # La derivada en z = 0 se toma como 0
    return dy * (z > 0)


def sigmoide(z: np.ndarray) -> np.ndarray:
    # Forma estable para valores muy negativos
    salida = np.empty_like(z)
    positivos = z >= 0
    salida[positivos] = 1.0 / (1.0 + np.exp(-z[positivos]))
    e = np.exp(z[~positivos])
    salida[~positivos] = e / (1.0 + e)
    return salida


def sigmoide_backward(y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Backward a partir de la salida y = σ(z)."""
    return dy * y * (1.0 - y)
