"""
Define la clase para medir el tiempo de pared de cada fase del entrenamiento.
"""

import time
from contextlib import contextmanager
from typing import Dict, Iterator, Optional


class Cronometro:
    """
    Acumula segundos por fase (p. ej. 'forward', 'backward', 'actualizacion').
    Solo una fase corre a la vez; iniciar otra detiene la anterior.
    """
    def __init__(self):
        self.tiempos: Dict[str, float] = {}
        self.fase_activa: Optional[str] = None  # Qué fase está corriendo
        self._ultimo_timestamp: Optional[float] = None

    def iniciar(self, fase: str):
        """ Comienza a contar tiempo para la fase indicada. """
        if self.fase_activa is not None and self.fase_activa != fase:
            self._acumular()
        self.fase_activa = fase
        self.tiempos.setdefault(fase, 0.0)
        self._ultimo_timestamp = time.monotonic()

    def detener(self):
        """ Detiene la fase activa sumando su tiempo transcurrido. """
        self._acumular()
        self.fase_activa = None
        self._ultimo_timestamp = None

    def _acumular(self):
        if self.fase_activa is not None and self._ultimo_timestamp is not None:
            ahora = time.monotonic()
            self.tiempos[self.fase_activa] += ahora - self._ultimo_timestamp
            self._ultimo_timestamp = ahora

    @contextmanager
    def medir(self, fase: str) -> Iterator[None]:
        """ Mide el bloque `with` como parte de la fase dada. """
        self.iniciar(fase)
        try:
            yield
        finally:
            self.detener()

    def get_tiempo(self, fase: str) -> float:
        """ Segundos acumulados en una fase (0 si nunca se midió). """
        if self.fase_activa == fase:
            self._acumular()
        return self.tiempos.get(fase, 0.0)

    def total(self) -> float:
        return sum(self.tiempos.values())

    def reiniciar(self):
        self.detener()
        self.tiempos = {}

    def __str__(self) -> str:
        partes = ", ".join(f"{fase}: {segundos:.3f}s" for fase, segundos in sorted(self.tiempos.items()))
        return f"Cronometro({partes}, Activa: {self.fase_activa})"
