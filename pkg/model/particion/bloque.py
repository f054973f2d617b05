"""
Define la clase Bloque: manifiesto de un bloque espacial de la escena con sus
límites, puntos, anclas y cámaras asignadas.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

Procedencia = Literal['inicial', 'etapa1_directa', 'etapa1_voraz', 'etapa2']
Limites = Tuple[float, float, float, float]  # (min_eje0, max_eje0, min_eje1, max_eje1)


@dataclass
class PasoVoraz:
    """Una iteración del bucle voraz de la etapa 1: cámara elegida, ganancias de las candidatas y objetivo s."""
    camara: int
    ganancia: int
    ganancias: Dict[int, int]
    objetivo: int = 0


@dataclass
class Bloque:
    """
    Manifiesto de un bloque (i, j) de la rejilla M×N, con id = i·N + j.

    `limites` son los del bloque expandido un 5% por arista (±∞ en los bordes
    exteriores); `limites_celda` los de la celda sin expandir, usados para la
    asignación inicial estricta de cámaras. `n_vis[p]` cuenta las cámaras
    asignadas desde las que se ve el punto p.
    """
    id: int
    fila: int
    columna: int
    ejes: Tuple[int, int]
    limites: Limites
    limites_celda: Limites
    puntos: List[int] = field(default_factory=list)
    anclas: List[int] = field(default_factory=list)
    camaras: Dict[int, Procedencia] = field(default_factory=dict)
    n_vis: Dict[int, int] = field(default_factory=dict)
    historial_voraz: List[PasoVoraz] = field(default_factory=list)

    def contiene(self, coordenadas: np.ndarray, expandido: bool = True, estricto: bool = False) -> np.ndarray:
        """
        Máscara de las filas de `coordenadas` (n,3) que caen dentro del bloque.

        Args:
            expandido: Usar los límites expandidos (True) o los de la celda.
            estricto: Desigualdades estrictas (interior) en lugar de inclusivas.
        """
        x0, x1, y0, y1 = self.limites if expandido else self.limites_celda
        a = np.atleast_2d(coordenadas)[:, self.ejes[0]]
        b = np.atleast_2d(coordenadas)[:, self.ejes[1]]
        if estricto:
            return (a > x0) & (a < x1) & (b > y0) & (b < y1)
        return (a >= x0) & (a <= x1) & (b >= y0) & (b <= y1)

    def asignar_camara(self, camara: int, procedencia: Procedencia) -> bool:
        """Añade una cámara si no estaba ya. Devuelve True si se añadió."""
        if camara in self.camaras:
            return False
        self.camaras[camara] = procedencia
        return True

    def ids_camaras(self) -> List[int]:
        return sorted(self.camaras)

    def minimo_supervision(self) -> int:
        return min(self.n_vis.values()) if self.n_vis else 0

    def a_diccionario(self) -> Dict[str, Any]:
        """Representación serializable a JSON (±∞ como cadenas)."""
        def limpiar(limites):
            return [v if np.isfinite(v) else ('inf' if v > 0 else '-inf') for v in limites]
        return {
            'id': self.id,
            'fila': self.fila,
            'columna': self.columna,
            'ejes': list(self.ejes),
            'limites': limpiar(self.limites),
            'limites_celda': limpiar(self.limites_celda),
            'puntos': list(self.puntos),
            'anclas': list(self.anclas),
            'camaras': [{'id': c, 'procedencia': p} for c, p in sorted(self.camaras.items())],
            'n_vis': {str(p): n for p, n in sorted(self.n_vis.items())},
        }

    @classmethod
    def desde_diccionario(cls, datos: Dict[str, Any]) -> 'Bloque':
        def leer(limites):
            return tuple(float(v) for v in limites)
        return cls(
            id=int(datos['id']), fila=int(datos['fila']), columna=int(datos['columna']),
            ejes=tuple(datos['ejes']), limites=leer(datos['limites']), limites_celda=leer(datos['limites_celda']),
            puntos=[int(p) for p in datos['puntos']], anclas=[int(a) for a in datos['anclas']],
            camaras={int(c['id']): c['procedencia'] for c in datos['camaras']},
            n_vis={int(p): int(n) for p, n in datos['n_vis'].items()},
        )

    def copiar(self) -> 'Bloque':
        return Bloque(self.id, self.fila, self.columna, self.ejes, self.limites, self.limites_celda,
                      list(self.puntos), list(self.anclas), dict(self.camaras), dict(self.n_vis),
                      list(self.historial_voraz))


def bloque_por_id(bloques: List[Bloque], id_bloque: int) -> Optional[Bloque]:
    for bloque in bloques:
        if bloque.id == id_bloque:
            return bloque
    return None
