"""
Funciones de pérdida del entrenamiento: fotométrica, de proyección, de volumen
y su combinación ponderada.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from model.errores import ErrorEntradaInvalida
from model.escena.ancla import Ancla
from model.escena.gaussiana import Gaussiana
from model.escena.vista_camara import VistaCamara
from model.perdidas.metricas import gradiente_ssim, l1, ssim

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DesglosePerdida:
    """
    Componentes de la pérdida. `l_ssim` es la disimilitud 1 − SSIM.
    total = l_photo + λ_vol·l_vol + λ_proj·l_proj y l_photo = λ_SSIM·l_ssim + λ_1·l_1.
    """
    l_photo: float
    l_ssim: float
    l_1: float
    l_proj: float
    l_vol: float
    total: float
    lambda_ssim: float
    lambda_1: float
    lambda_proj: float
    lambda_vol: float

    def a_diccionario(self) -> Dict[str, float]:
        return asdict(self)


def _validar_pesos(**pesos: float):
    negativos = {n: v for n, v in pesos.items() if v < 0}
    if negativos:
        logger.error(f"Pesos de pérdida negativos: {negativos}")
        raise ErrorEntradaInvalida(f"Los pesos de la pérdida deben ser >= 0: {negativos}")


# ============================================================
# Fotométrica
# ============================================================

def photometric_loss(I_r: np.ndarray, I_gt: np.ndarray, lambda_ssim: float = 0.2, lambda_1: float = 0.8) -> float:
    """λ_SSIM·(1 − SSIM) + λ_1·mean|I_r − I_gt|."""
    _validar_pesos(lambda_ssim=lambda_ssim, lambda_1=lambda_1)
    termino_ssim = 0.0 if lambda_ssim == 0 else lambda_ssim * (1.0 - ssim(I_r, I_gt))
    return termino_ssim + lambda_1 * l1(I_r, I_gt)


def gradiente_fotometrico(I_r: np.ndarray, I_gt: np.ndarray, lambda_ssim: float,
                          lambda_1: float) -> Tuple[float, float, float, np.ndarray]:
    """
    Pérdida fotométrica y su gradiente respecto a I_r.

    Returns:
        (l_photo, 1 − SSIM, L1, dL/dI_r).
    """
    _validar_pesos(lambda_ssim=lambda_ssim, lambda_1=lambda_1)
    valor_ssim, d_ssim = gradiente_ssim(I_r, I_gt)
    diferencia = I_r - I_gt
    valor_l1 = float(np.mean(np.abs(diferencia)))
    gradiente = -lambda_ssim * d_ssim + lambda_1 * np.sign(diferencia) / diferencia.size
    l_ssim = 1.0 - valor_ssim
    return lambda_ssim * l_ssim + lambda_1 * valor_l1, l_ssim, valor_l1, gradiente


# ============================================================
# Proyección
# ============================================================

def perdida_proyeccion_lote(nc: np.ndarray, bc: np.ndarray, p_hat: np.ndarray, radios_amplios: np.ndarray,
                            visibles: np.ndarray, radio_estrecho: float):
    """
    Σ max(‖nc‖ − ṙ, 0) + Σ max(‖(bc − 1) ⊙ p̂‖ − Ṙ, 0) sobre las anclas visibles.

    Args:
        nc, bc: (A, k_s, 2). p_hat: (A, 2). radios_amplios: (A,). visibles: (A,) bool.

    Returns:
        (valor, dL/dnc, dL/dbc, firma) con la firma formada por las máscaras de bisagra activa.
    """
    d_n = nc
    d_b = (bc - 1.0) * p_hat[:, None, :]
    norma_n = np.linalg.norm(d_n, axis=2)
    norma_b = np.linalg.norm(d_b, axis=2)
    activa_n = (norma_n > radio_estrecho) & visibles[:, None]
    activa_b = (norma_b > radios_amplios[:, None]) & visibles[:, None]
    valor = float(np.sum(np.where(activa_n, norma_n - radio_estrecho, 0.0))
                  + np.sum(np.where(activa_b, norma_b - radios_amplios[:, None], 0.0)))
    seguro_n = np.where(activa_n, norma_n, 1.0)
    seguro_b = np.where(activa_b, norma_b, 1.0)
    grad_nc = np.where(activa_n[..., None], d_n / seguro_n[..., None], 0.0)
    grad_bc = np.where(activa_b[..., None], d_b / seguro_b[..., None], 0.0) * p_hat[:, None, :]
    return valor, grad_nc, grad_bc, [activa_n, activa_b]


def projection_loss(anchors: Sequence[Ancla], cams_in_batch: Iterable[VistaCamara], radio_estrecho: float,
                    radio_amplio_max: float, plano_cercano: float = 0.01) -> float:
    """
    Pérdida de proyección sumada sobre las vistas del lote, contando en cada vista
    solo las anclas que quedan delante de la cámara.
    """
    if not anchors:
        return 0.0
    centros = np.stack([a.centro for a in anchors])
    nc = np.stack([a.nc for a in anchors])
    bc = np.stack([a.bc for a in anchors])
    total = 0.0
    for vista in cams_in_batch:
        uv, z = vista.proyectar(centros)
        p_hat = uv * vista.escala_mapa
        distancias = np.linalg.norm(centros - vista.centro[None, :], axis=1)
        radios = radio_amplio_max / np.where(distancias > 0, distancias, np.inf)
        valor, _, _, _ = perdida_proyeccion_lote(nc, bc, p_hat, radios, z > plano_cercano, radio_estrecho)
        total += valor
    return total


# ============================================================
# Volumen y total
# ============================================================

def volume_loss(gaussians: Union[Sequence[Gaussiana], np.ndarray]) -> float:
    """Σ_i s_x·s_y·s_z. Acepta Gaussianas o directamente un array de escalas (N, 3)."""
    if isinstance(gaussians, np.ndarray):
        escalas = gaussians.reshape(-1, 3)
    else:
        lista: List[np.ndarray] = [g.escala for g in gaussians]
        escalas = np.stack(lista) if lista else np.zeros((0, 3))
    return float(np.sum(np.prod(escalas, axis=1)))


def total_loss(l_ssim: float, l_1: float, l_proj: float, l_vol: float, lambda_ssim: float = 0.2,
               lambda_1: float = 0.8, lambda_proj: float = 0.01, lambda_vol: float = 0.01) -> DesglosePerdida:
    """Combina los componentes en un DesglosePerdida."""
    _validar_pesos(lambda_ssim=lambda_ssim, lambda_1=lambda_1, lambda_proj=lambda_proj, lambda_vol=lambda_vol)
    l_photo = lambda_ssim * l_ssim + lambda_1 * l_1
    total = l_photo + lambda_vol * l_vol + lambda_proj * l_proj
    return DesglosePerdida(l_photo, l_ssim, l_1, l_proj, l_vol, total,
                           lambda_ssim, lambda_1, lambda_proj, lambda_vol)
