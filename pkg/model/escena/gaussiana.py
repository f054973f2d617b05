"""
Define la primitiva Gaussiana 3D y las operaciones geométricas básicas:
conversión de cuaterniones, construcción de covarianzas y evaluación de densidad.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from model.errores import ErrorCovarianzaDegenerada, ErrorEntradaInvalida

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

ESCALA_MINIMA = 1e-8
TOLERANCIA_CUATERNION = 1e-9


# ============================================================
# Cuaterniones (convención (w, x, y, z))
# ============================================================

def normalizar_cuaterniones(q: np.ndarray) -> np.ndarray:
    """Normaliza uno o varios cuaterniones. Un cuaternión nulo es un error."""
    q = np.asarray(q, dtype=np.float64)
    normas = np.linalg.norm(q, axis=-1, keepdims=True)
    if np.any(normas < 1e-12):
        logger.error("Cuaternión de norma nula, no se puede normalizar.")
        raise ErrorEntradaInvalida("Cuaternión de norma nula.")
    return q / normas


def cuaterniones_a_rotaciones(q: np.ndarray) -> np.ndarray:
    """
    Convierte cuaterniones unitarios (..., 4) en matrices de rotación (..., 3, 3).
    """
    q = np.asarray(q, dtype=np.float64)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    R = np.empty(q.shape[:-1] + (3, 3))
    R[..., 0, 0] = 1 - 2 * (y * y + z * z)
    R[..., 0, 1] = 2 * (x * y - w * z)
    R[..., 0, 2] = 2 * (x * z + w * y)
    R[..., 1, 0] = 2 * (x * y + w * z)
    R[..., 1, 1] = 1 - 2 * (x * x + z * z)
    R[..., 1, 2] = 2 * (y * z - w * x)
    R[..., 2, 0] = 2 * (x * z - w * y)
    R[..., 2, 1] = 2 * (y * z + w * x)
    R[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return R


def cuaternion_a_rotacion(q: np.ndarray) -> np.ndarray:
    return cuaterniones_a_rotaciones(np.asarray(q, dtype=np.float64).reshape(4))


def rotacion_a_cuaternion(R: np.ndarray) -> np.ndarray:
    """Cuaternión (w, x, y, z) con w >= 0 de una matriz de rotación 3×3."""
    R = np.asarray(R, dtype=np.float64)
    traza = np.trace(R)
    if traza > 0:
        s = 2.0 * np.sqrt(1.0 + traza)
        q = np.array([0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s])
    elif R[0, 0] > R[1, 1] and R[0, 0] > R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
        q = np.array([(R[2, 1] - R[1, 2]) / s, 0.25 * s, (R[0, 1] + R[1, 0]) / s, (R[0, 2] + R[2, 0]) / s])
    elif R[1, 1] > R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2])
        q = np.array([(R[0, 2] - R[2, 0]) / s, (R[0, 1] + R[1, 0]) / s, 0.25 * s, (R[1, 2] + R[2, 1]) / s])
    else:
        s = 2.0 * np.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1])
        q = np.array([(R[1, 0] - R[0, 1]) / s, (R[0, 2] + R[2, 0]) / s, (R[1, 2] + R[2, 1]) / s, 0.25 * s])
    if q[0] < 0:
        q = -q
    return q / np.linalg.norm(q)


# ============================================================
# Covarianza y densidad
# ============================================================

def _validar_escalas(s: np.ndarray):
    if np.any(~np.isfinite(s)) or np.any(s <= ESCALA_MINIMA):
        logger.error(f"Escalas por debajo del mínimo {ESCALA_MINIMA}: {s}")
        raise ErrorCovarianzaDegenerada(f"Las escalas deben ser > {ESCALA_MINIMA}.")


def construir_covarianzas(q: np.ndarray, s: np.ndarray) -> np.ndarray:
    """
    Versión por lotes de build_covariance: q (N,4) unitarios, s (N,3) → Σ (N,3,3).
    Los cuaterniones se normalizan aquí sin comprobar la tolerancia.
    """
    s = np.asarray(s, dtype=np.float64)
    _validar_escalas(s)
    R = cuaterniones_a_rotaciones(normalizar_cuaterniones(q))
    RS = R * s[..., None, :]
    return RS @ np.swapaxes(RS, -1, -2)


def build_covariance(q: np.ndarray, s: np.ndarray) -> np.ndarray:
    """
    Construye Σ = R S Sᵀ Rᵀ a partir de un cuaternión unitario y un vector de escalas.

    Args:
        q: Cuaternión (w, x, y, z) de norma 1 (tolerancia 1e-9).
        s: Escalas estrictamente positivas.

    Returns:
        Matriz 3×3 simétrica semidefinida positiva.

    Raises:
        ErrorEntradaInvalida: Si el cuaternión no es unitario.
        ErrorCovarianzaDegenerada: Si alguna escala es <= 1e-8.
    """
    q = np.asarray(q, dtype=np.float64).reshape(4)
    s = np.asarray(s, dtype=np.float64).reshape(3)
    if abs(np.linalg.norm(q) - 1.0) > TOLERANCIA_CUATERNION:
        logger.error(f"Cuaternión no unitario: {q} (norma {np.linalg.norm(q)})")
        raise ErrorEntradaInvalida("El cuaternión debe ser unitario.")
    _validar_escalas(s)
    RS = cuaternion_a_rotacion(q) * s[None, :]
    sigma = RS @ RS.T
    return 0.5 * (sigma + sigma.T)


# ============================================================
# Primitiva
# ============================================================

@dataclass
class Gaussiana:
    """
    Una Gaussiana 3D anisótropa. El cuaternión se normaliza al construirla y las
    escalas por debajo del mínimo se rechazan.
    """
    media: np.ndarray
    rotacion: np.ndarray
    escala: np.ndarray
    opacidad: float = 1.0
    color: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.media = np.asarray(self.media, dtype=np.float64).reshape(3)
        self.rotacion = normalizar_cuaterniones(np.asarray(self.rotacion, dtype=np.float64).reshape(4))
        self.escala = np.asarray(self.escala, dtype=np.float64).reshape(3)
        self.color = np.asarray(self.color, dtype=np.float64).reshape(3)
        _validar_escalas(self.escala)
        if not 0.0 <= self.opacidad <= 1.0:
            logger.error(f"Opacidad fuera de [0,1]: {self.opacidad}")
            raise ErrorEntradaInvalida("La opacidad debe estar en [0, 1].")

    @property
    def covarianza(self) -> np.ndarray:
        return build_covariance(self.rotacion, self.escala)


def gaussian_density(g: Gaussiana, x: np.ndarray) -> float:
    """
    Evalúa exp(-½ (x-μ)ᵀ Σ⁻¹ (x-μ)). Vale exactamente 1 en x = μ.

    Raises:
        ErrorCovarianzaDegenerada: Si Σ no es invertible.
    """
    d = np.asarray(x, dtype=np.float64).reshape(3) - g.media
    if not np.any(d):
        return 1.0
    sigma = g.covarianza
    try:
        mahalanobis = float(d @ np.linalg.solve(sigma, d))
    except np.linalg.LinAlgError as e:
        logger.error(f"Covarianza singular al evaluar la densidad: {e}")
        raise ErrorCovarianzaDegenerada("Covarianza singular.") from e
    return float(np.exp(-0.5 * mahalanobis))
