"""
Jerarquía de excepciones del proyecto.

Cada error de dominio hereda además de la excepción estándar equivalente
(ValueError, RuntimeError, ...) para que el código cliente pueda capturarlos
de forma genérica si lo prefiere.
"""

from typing import Optional, Sequence


class ErrorSplat(Exception):
    """Raíz de todos los errores propios del proyecto."""


class ErrorEntradaInvalida(ErrorSplat, ValueError):
    """Argumentos mal formados: formas que no cuadran, ids desconocidos, cuaterniones no unitarios."""


class ErrorConfiguracion(ErrorSplat, ValueError):
    """Hiperparámetros incompatibles entre sí (p. ej. n_r no divisible entre 2M+2)."""


class ErrorGeometriaDegenerada(ErrorSplat, ValueError):
    """Geometría sin extensión útil: punto y cámara coincidentes, nube colineal, etc."""


class ErrorCovarianzaDegenerada(ErrorGeometriaDegenerada):
    """Covarianza singular o con escalas por debajo del mínimo admitido."""


class ErrorEstado(ErrorSplat, RuntimeError):
    """Operación invocada sin el estado previo que necesita (p. ej. backward sin registro)."""


class ErrorNumerico(ErrorSplat, FloatingPointError):
    """
    Aparición de NaN/Inf durante el entrenamiento.

    Attributes:
        ruta_diagnostico: Fichero .npz con los tensores volcados, si se pudo escribir.
        tensores_no_finitos: Nombres de los tensores que contenían valores no finitos.
    """

    def __init__(self, mensaje: str, ruta_diagnostico: Optional[str] = None,
                 tensores_no_finitos: Sequence[str] = ()):
        super().__init__(mensaje)
        self.ruta_diagnostico = ruta_diagnostico
        self.tensores_no_finitos = list(tensores_no_finitos)
