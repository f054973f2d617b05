"""
Registro del entrenamiento: un desglose de pérdida por iteración, métricas de
evaluación periódicas y tiempos de pared por fase.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from model.perdidas.funciones_perdida import DesglosePerdida

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

COLUMNAS_TSV = ('iteracion', 'periodo', 'ranura', 'bloque', 'vista',
                'l_photo', 'l_ssim', 'l_1', 'l_proj', 'l_vol', 'total')


@dataclass(frozen=True)
class EntradaRegistro:
    iteracion: int
    periodo: int
    ranura: int
    bloque: int
    vista: int
    desglose: DesglosePerdida


@dataclass
class RegistroEntrenamiento:
    """
    `entradas` tiene exactamente una entrada por iteración. `tiempos` no forma
    parte del TSV, de modo que dos ejecuciones con la misma semilla escriben el
    mismo fichero byte a byte.
    """
    entradas: List[EntradaRegistro] = field(default_factory=list)
    evaluaciones: List[Dict[str, float]] = field(default_factory=list)
    tiempos: Dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entradas)

    def agregar(self, entrada: EntradaRegistro):
        self.entradas.append(entrada)

    def perdidas(self) -> np.ndarray:
        return np.array([e.desglose.total for e in self.entradas])

    def media_movil(self, ventana: int) -> np.ndarray:
        """Media móvil de la pérdida total sobre `ventana` iteraciones (modo 'valid')."""
        perdidas = self.perdidas()
        if ventana < 1 or perdidas.size < ventana:
            return np.zeros(0)
        acumulada = np.cumsum(np.concatenate([[0.0], perdidas]))
        return (acumulada[ventana:] - acumulada[:-ventana]) / ventana

    def filas_tsv(self) -> List[List[str]]:
        filas = []
        for e in self.entradas:
            d = e.desglose
            filas.append([str(e.iteracion), str(e.periodo), str(e.ranura), str(e.bloque), str(e.vista)]
                         + ['%.17g' % valor for valor in (d.l_photo, d.l_ssim, d.l_1, d.l_proj, d.l_vol, d.total)])
        return filas

    def a_tsv(self) -> str:
        lineas = ['\t'.join(COLUMNAS_TSV)] + ['\t'.join(fila) for fila in self.filas_tsv()]
        return '\n'.join(lineas) + '\n'

    def escribir_tsv(self, ruta: str):
        with open(ruta, 'w', encoding='utf-8', newline='\n') as fichero:
            fichero.write(self.a_tsv())
        logger.info(f"Registro de entrenamiento escrito en '{ruta}' ({len(self.entradas)} iteraciones).")
