"""
Se encarga de la presentación en texto: tablas TSV en un flujo de salida o en
fichero (histogramas de supervisión, calendario de rotación, métricas).
"""

import logging
import sys
from typing import Dict, Iterable, Mapping, Optional, Sequence, TextIO

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

COLUMNAS_HISTOGRAMA = ('variante', 'bloque', 'n_vis', 'puntos')
COLUMNAS_METRICAS = ('vista', 'psnr', 'ssim', 'l1', 'perdida')


def _celda(valor) -> str:
    if isinstance(valor, float):
        return '%.17g' % valor
    return str(valor)


def escribir_tsv(cabecera: Sequence[str], filas: Iterable[Sequence], destino: Optional[TextIO] = None):
    """Escribe una cabecera y filas separadas por tabuladores (stdout por defecto)."""
    destino = destino or sys.stdout
    destino.write('\t'.join(cabecera) + '\n')
    for fila in filas:
        destino.write('\t'.join(_celda(v) for v in fila) + '\n')


def guardar_tsv(ruta: str, cabecera: Sequence[str], filas: Iterable[Sequence]) -> str:
    with open(ruta, 'w', encoding='utf-8', newline='\n') as fichero:
        escribir_tsv(cabecera, filas, fichero)
    logger.info(f"Tabla escrita en '{ruta}'.")
    return ruta


def filas_histograma(histogramas: Mapping[str, Mapping[int, Mapping[int, int]]]):
    """
    Aplana {variante: {bloque: {n_vis: puntos}}} en filas (variante, bloque, n_vis, puntos).
    """
    for variante, por_bloque in histogramas.items():
        for bloque, cuentas in sorted(por_bloque.items()):
            for n_vis, puntos in sorted(cuentas.items()):
                yield variante, bloque, n_vis, puntos


def cabecera_calendario(num_ranuras: int):
    return ['periodo', 'inicio', 'fin'] + [f'ranura_{g}' for g in range(num_ranuras)]


def filas_metricas(metricas: Dict[int, Dict[str, float]]):
    """Una fila por vista y una última fila 'media' con el promedio de cada columna."""
    filas = [[id_vista] + [valores[c] for c in COLUMNAS_METRICAS[1:]]
             for id_vista, valores in sorted(metricas.items())]
    if filas:
        medias = [sum(f[j] for f in filas) / len(filas) for j in range(1, len(COLUMNAS_METRICAS))]
        filas.append(['media'] + medias)
    return filas
