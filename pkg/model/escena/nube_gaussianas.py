"""
Vista plana (en arrays) de todas las Gaussianas de una escena.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from model.escena.ancla import Ancla, anchor_to_gaussians
from model.escena.gaussiana import construir_covarianzas


@dataclass
class NubeGaussianas:
    """
    medias (N,3), rotaciones (N,4) y escalas (N,3). Cuando la nube procede de
    anclas, el índice i·k + j corresponde a la hija j del ancla i.
    """
    medias: np.ndarray
    rotaciones: np.ndarray
    escalas: np.ndarray

    def __post_init__(self):
        self.medias = np.asarray(self.medias, dtype=np.float64).reshape(-1, 3)
        self.rotaciones = np.asarray(self.rotaciones, dtype=np.float64).reshape(-1, 4)
        self.escalas = np.asarray(self.escalas, dtype=np.float64).reshape(-1, 3)

    def __len__(self) -> int:
        return self.medias.shape[0]

    def covarianzas(self) -> np.ndarray:
        if len(self) == 0:
            return np.zeros((0, 3, 3))
        return construir_covarianzas(self.rotaciones, self.escalas)

    @classmethod
    def desde_anclas(cls, anclas: Sequence[Ancla]) -> 'NubeGaussianas':
        if not anclas:
            return cls(np.zeros((0, 3)), np.zeros((0, 4)), np.zeros((0, 3)))
        return cls(
            medias=np.concatenate([anchor_to_gaussians(a) for a in anclas]),
            rotaciones=np.concatenate([a.rotaciones for a in anclas]),
            escalas=np.concatenate([a.escalas for a in anclas]),
        )
