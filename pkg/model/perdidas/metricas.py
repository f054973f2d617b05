"""
Métricas de imagen: PSNR, SSIM (con su gradiente) y L1.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.signal import convolve2d, correlate2d

from model.errores import ErrorEntradaInvalida

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

PSNR_MAXIMO = 100.0
TAMANO_VENTANA = 11
SIGMA_VENTANA = 1.5
C1 = 0.01 ** 2
C2 = 0.03 ** 2


def ventana_gaussiana(tamano: int = TAMANO_VENTANA, sigma: float = SIGMA_VENTANA) -> np.ndarray:
    """Ventana gaussiana 2D normalizada a suma 1."""
    eje = np.arange(tamano) - (tamano - 1) / 2.0
    g = np.exp(-(eje ** 2) / (2.0 * sigma ** 2))
    ventana = np.outer(g, g)
    return ventana / ventana.sum()


def _comprobar_formas(I_r: np.ndarray, I_gt: np.ndarray):
    if I_r.shape != I_gt.shape:
        logger.error(f"Formas distintas: {I_r.shape} vs {I_gt.shape}")
        raise ErrorEntradaInvalida(f"Las imágenes deben tener la misma forma: {I_r.shape} != {I_gt.shape}.")


def _como_canales(I: np.ndarray) -> np.ndarray:
    """(H,W) o (H,W,C) → (C,H,W)."""
    I = np.asarray(I, dtype=np.float64)
    return I[None] if I.ndim == 2 else np.moveaxis(I, -1, 0)


def psnr(I_r: np.ndarray, I_gt: np.ndarray) -> float:
    """
    10·log10(1/MSE) en dB para imágenes en [0, 1]. Imágenes idénticas devuelven
    el centinela de 100 dB.

    Raises:
        ErrorEntradaInvalida: Si las formas no coinciden.
    """
    I_r, I_gt = np.asarray(I_r, dtype=np.float64), np.asarray(I_gt, dtype=np.float64)
    _comprobar_formas(I_r, I_gt)
    mse = float(np.mean((I_r - I_gt) ** 2))
    if mse == 0.0:
        return PSNR_MAXIMO
    return min(PSNR_MAXIMO, 10.0 * np.log10(1.0 / mse))


def l1(I_r: np.ndarray, I_gt: np.ndarray) -> float:
    """Media de |I_r − I_gt|."""
    I_r, I_gt = np.asarray(I_r, dtype=np.float64), np.asarray(I_gt, dtype=np.float64)
    _comprobar_formas(I_r, I_gt)
    return float(np.mean(np.abs(I_r - I_gt)))


@dataclass
class _EstadisticosSSIM:
    mu_x: np.ndarray
    mu_y: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    mapa: np.ndarray


def _estadisticos(x: np.ndarray, y: np.ndarray, ventana: np.ndarray) -> _EstadisticosSSIM:
    filtrar = lambda z: correlate2d(z, ventana, mode='valid')  # noqa: E731
    mu_x, mu_y = filtrar(x), filtrar(y)
    sigma_xx = filtrar(x * x) - mu_x * mu_x
    sigma_yy = filtrar(y * y) - mu_y * mu_y
    sigma_xy = filtrar(x * y) - mu_x * mu_y
    A1 = 2.0 * mu_x * mu_y + C1
    A2 = 2.0 * sigma_xy + C2
    B1 = mu_x * mu_x + mu_y * mu_y + C1
    B2 = sigma_xx + sigma_yy + C2
    return _EstadisticosSSIM(mu_x, mu_y, A1, A2, B1, B2, (A1 * A2) / (B1 * B2))


def _validar_ventana(I: np.ndarray):
    if I.shape[1] < TAMANO_VENTANA or I.shape[2] < TAMANO_VENTANA:
        logger.error(f"Imagen {I.shape[1:]} menor que la ventana SSIM de {TAMANO_VENTANA}.")
        raise ErrorEntradaInvalida(f"La imagen debe medir al menos {TAMANO_VENTANA}×{TAMANO_VENTANA} para SSIM.")


def ssim(I_r: np.ndarray, I_gt: np.ndarray) -> float:
    """
    SSIM medio con ventana gaussiana 11×11 (σ = 1.5), C1 = 0.01², C2 = 0.03²,
    ventanas completamente dentro de la imagen, promediado por canal.

    Raises:
        ErrorEntradaInvalida: Si las formas no coinciden o la imagen es menor que la ventana.
    """
    X, Y = _como_canales(I_r), _como_canales(I_gt)
    _comprobar_formas(X, Y)
    _validar_ventana(X)
    ventana = ventana_gaussiana()
    return float(np.mean([np.mean(_estadisticos(x, y, ventana).mapa) for x, y in zip(X, Y)]))


def gradiente_ssim(I_r: np.ndarray, I_gt: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    SSIM y su gradiente respecto a I_r (misma forma que I_r).

    Con S = A1·A2/(B1·B2) por ventana, las derivadas respecto a μx, E[x²] y E[xy]
    se llevan de vuelta a los píxeles con la convolución adjunta de la ventana.
    """
    X, Y = _como_canales(I_r), _como_canales(I_gt)
    _comprobar_formas(X, Y)
    _validar_ventana(X)
    ventana = ventana_gaussiana()
    valores, gradientes = [], []
    for x, y in zip(X, Y):
        e = _estadisticos(x, y, ventana)
        n = e.mapa.size * X.shape[0]
        S = e.mapa
        d_mu = (2.0 * e.mu_y * (e.A2 - e.A1) / (e.B1 * e.B2)
                - 2.0 * e.mu_x * S / e.B1 + 2.0 * e.mu_x * S / e.B2) / n
        d_exx = -S / e.B2 / n
        d_exy = 2.0 * e.A1 / (e.B1 * e.B2) / n
        dx = (convolve2d(d_mu, ventana, mode='full')
              + 2.0 * x * convolve2d(d_exx, ventana, mode='full')
              + y * convolve2d(d_exy, ventana, mode='full'))
        valores.append(np.mean(S))
        gradientes.append(dx)
    gradiente = np.stack(gradientes)
    gradiente = gradiente[0] if np.asarray(I_r).ndim == 2 else np.moveaxis(gradiente, 0, -1)
    return float(np.mean(valores)), gradiente
