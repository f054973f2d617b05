"""
Calendario de entrenamiento rotacional por bloques: en cada periodo de N_iter
iteraciones cada ranura de cómputo aloja un bloque, y los bloques rotan entre
ranuras periodo a periodo.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from model.errores import ErrorConfiguracion

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

# Id de bloque que representa un periodo de escena completa.
ESCENA_COMPLETA = -1


@dataclass(frozen=True)
class PeriodoRotacion:
    """Rango de iteraciones [inicio, fin) y bloque alojado en cada ranura."""
    inicio: int
    fin: int
    asignacion: Tuple[int, ...]

    @property
    def escena_completa(self) -> bool:
        return all(b == ESCENA_COMPLETA for b in self.asignacion)


@dataclass
class CalendarioRotacion:
    """
    Lista de periodos con su asignación ranura → bloque y el periodo de rotación N_iter.
    """
    periodos: List[PeriodoRotacion]
    n_iter: int
    num_bloques: int
    num_ranuras: int
    total_iteraciones: int
    alternar_escena_completa: bool = False

    def periodo_de_iteracion(self, iteracion: int) -> int:
        return iteracion // self.n_iter

    def ranura_de_iteracion(self, iteracion: int) -> int:
        t = self.periodo_de_iteracion(iteracion)
        return (iteracion - t * self.n_iter) % self.num_ranuras

    def bloque_para_iteracion(self, iteracion: int) -> Tuple[int, int, int]:
        """
        (periodo, ranura, bloque) que entrena en la iteración dada. Las ranuras de
        un periodo se simulan en secuencia, intercalando sus iteraciones.
        """
        t = self.periodo_de_iteracion(iteracion)
        ranura = self.ranura_de_iteracion(iteracion)
        return t, ranura, self.periodos[t].asignacion[ranura]

    def conteos_por_bloque(self) -> Dict[int, int]:
        """Número de periodos en que aparece cada bloque real."""
        conteos = {b: 0 for b in range(self.num_bloques)}
        for periodo in self.periodos:
            for bloque in periodo.asignacion:
                if bloque != ESCENA_COMPLETA:
                    conteos[bloque] += 1
        return conteos

    def pares_visitados(self) -> List[Tuple[int, int]]:
        """Multiconjunto de (bloque, periodo) definido por el calendario."""
        return sorted((b, t) for t, p in enumerate(self.periodos) for b in p.asignacion)

    def tabla(self) -> List[List[int]]:
        """Filas [periodo, inicio, fin, bloque_ranura_0, ..., bloque_ranura_S-1]."""
        return [[t, p.inicio, p.fin, *p.asignacion] for t, p in enumerate(self.periodos)]


def rotational_schedule(num_blocks: int, num_slots: int, N_iter: int, total_iters: int,
                        alternar_escena_completa: bool = False) -> CalendarioRotacion:
    """
    Genera el calendario round-robin: en el periodo de bloques t la ranura g aloja
    el bloque (g + t·S) mod B.

    Con `alternar_escena_completa`, tras cada ciclo completo de ⌈B/S⌉ periodos de
    bloques se inserta un periodo en que todas las ranuras entrenan la escena completa.

    Raises:
        ErrorConfiguracion: Si hay más ranuras que bloques, N_iter < 1 o parámetros no positivos.
    """
    if num_blocks < 1 or num_slots < 1:
        logger.error(f"Bloques/ranuras no positivos: {num_blocks}/{num_slots}")
        raise ErrorConfiguracion("El número de bloques y de ranuras debe ser >= 1.")
    if num_slots > num_blocks:
        logger.error(f"Más ranuras ({num_slots}) que bloques ({num_blocks}).")
        raise ErrorConfiguracion("El número de ranuras no puede superar al de bloques.")
    if N_iter < 1:
        logger.error(f"N_iter inválido: {N_iter}")
        raise ErrorConfiguracion("N_iter debe ser >= 1.")
    if total_iters < 0:
        raise ErrorConfiguracion("El total de iteraciones no puede ser negativo.")

    num_periodos = math.ceil(total_iters / N_iter)
    ciclo = math.ceil(num_blocks / num_slots)
    periodos: List[PeriodoRotacion] = []
    t_bloques = 0
    for t in range(num_periodos):
        inicio, fin = t * N_iter, min((t + 1) * N_iter, total_iters)
        # En el modo alterno, cada ciclo de bloques va seguido de un periodo completo
        if alternar_escena_completa and (t + 1) % (ciclo + 1) == 0:
            asignacion = tuple([ESCENA_COMPLETA] * num_slots)
        else:
            asignacion = tuple((g + t_bloques * num_slots) % num_blocks for g in range(num_slots))
            t_bloques += 1
        periodos.append(PeriodoRotacion(inicio, fin, asignacion))
    calendario = CalendarioRotacion(periodos, N_iter, num_blocks, num_slots, total_iters,
                                    alternar_escena_completa)
    logger.debug(f"Calendario de rotación: {num_periodos} periodos, {num_blocks} bloques, {num_slots} ranuras.")
    return calendario
