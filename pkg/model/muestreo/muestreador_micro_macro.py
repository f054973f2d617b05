"""
Proyección Micro-Macro: frustums estrechos con desplazamientos aprendidos y
frustums amplios escalados por la distancia, muestreo bilineal sobre la pirámide
wavelet y ensamblado de la característica refinada f_r.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorConfiguracion, ErrorGeometriaDegenerada
from model.escena.ancla import Ancla
from model.escena.vista_camara import VistaCamara
from model.wavelet.piramide_caracteristicas import PiramideCaracteristicas

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

TipoFrustum = Literal['estrecho', 'amplio']


@dataclass(frozen=True)
class FrustumSample:
    """
    Una muestra en coordenadas del mapa (píxeles de mapa, ya escalada al nivel m).
    `centro` es la proyección sin perturbar p̂ y `radio` el radio del frustum
    (ṙ para el estrecho, Ṙ para el amplio).
    """
    uv: Tuple[float, float]
    tipo: TipoFrustum
    nivel: int = 0
    subbanda: int = 0
    radio: float = 0.0
    centro: Tuple[float, float] = (0.0, 0.0)


# ============================================================
# Muestreo bilineal con gradientes
# ============================================================

@dataclass
class RegistroBilineal:
    """Celdas, pesos y pinzados de un muestreo bilineal, para el backward."""
    x0: np.ndarray
    y0: np.ndarray
    x1: np.ndarray
    y1: np.ndarray
    fx: np.ndarray
    fy: np.ndarray
    pinzado_u: np.ndarray
    pinzado_v: np.ndarray
    forma: Tuple[int, int, int]


def _celdas(coordenada: np.ndarray, tamano: int):
    pinzado = (coordenada < 0) | (coordenada > tamano - 1)
    c = np.clip(coordenada, 0.0, tamano - 1)
    c0 = np.minimum(np.floor(c).astype(np.int64), max(tamano - 2, 0))
    c1 = np.minimum(c0 + 1, tamano - 1)
    return c0, c1, c - c0, pinzado


def muestrear_bilineal(mapa: np.ndarray, uv: np.ndarray) -> Tuple[np.ndarray, RegistroBilineal]:
    """
    Interpolación bilineal de un mapa (C, H, W) en puntos uv (P, 2), con los centros
    de texel en coordenadas enteras y pinzado al borde.

    Returns:
        (valores (P, C), registro para el backward).
    """
    C, H, W = mapa.shape
    x0, x1, fx, pu = _celdas(uv[:, 0], W)
    y0, y1, fy, pv = _celdas(uv[:, 1], H)
    valores = (((1 - fx) * (1 - fy))[:, None] * mapa[:, y0, x0].T
               + (fx * (1 - fy))[:, None] * mapa[:, y0, x1].T
               + ((1 - fx) * fy)[:, None] * mapa[:, y1, x0].T
               + (fx * fy)[:, None] * mapa[:, y1, x1].T)
    return valores, RegistroBilineal(x0, y0, x1, y1, fx, fy, pu, pv, (C, H, W))


def retropropagar_bilineal(registro: RegistroBilineal, d_valores: np.ndarray) -> np.ndarray:
    """Gradiente respecto al mapa (C, H, W) de un muestreo bilineal."""
    C, H, W = registro.forma
    r = registro
    G = np.zeros((H, W, C))
    np.add.at(G, (r.y0, r.x0), ((1 - r.fx) * (1 - r.fy))[:, None] * d_valores)
    np.add.at(G, (r.y0, r.x1), (r.fx * (1 - r.fy))[:, None] * d_valores)
    np.add.at(G, (r.y1, r.x0), ((1 - r.fx) * r.fy)[:, None] * d_valores)
    np.add.at(G, (r.y1, r.x1), (r.fx * r.fy)[:, None] * d_valores)
    return np.transpose(G, (2, 0, 1))


def gradiente_uv_bilineal(mapa: np.ndarray, registro: RegistroBilineal, d_valores: np.ndarray) -> np.ndarray:
    """Gradiente respecto a uv (P, 2); nulo en los ejes pinzados."""
    r = registro
    F00 = mapa[:, r.y0, r.x0].T
    F01 = mapa[:, r.y0, r.x1].T
    F10 = mapa[:, r.y1, r.x0].T
    F11 = mapa[:, r.y1, r.x1].T
    du = ((1 - r.fy)[:, None] * (F01 - F00) + r.fy[:, None] * (F11 - F10)) * d_valores
    dv = ((1 - r.fx)[:, None] * (F10 - F00) + r.fx[:, None] * (F11 - F01)) * d_valores
    du = du.sum(axis=1) * ~r.pinzado_u
    dv = dv.sum(axis=1) * ~r.pinzado_v
    return np.stack([du, dv], axis=1)


# ============================================================
# Proyecciones escalares
# ============================================================

def _proyeccion_base(x_point: np.ndarray, cam: VistaCamara, plano_cercano: float) -> Optional[np.ndarray]:
    uv = cam.proyectar_punto(x_point, plano_cercano)
    if uv is None:
        return None
    return uv * cam.escala_mapa


def narrow_projection(x_point: np.ndarray, cam: VistaCamara, nc: np.ndarray, radio_estrecho: float,
                      plano_cercano: float = 0.01) -> Optional[List[FrustumSample]]:
    """
    Muestras del frustum estrecho: p̂ + nc_i en píxeles del mapa. Los nc no se
    recortan aquí (la pérdida de proyección los limita a ‖nc_i‖ ≤ ṙ).

    Returns:
        k_s muestras, o None si el punto queda detrás de la cámara.
    """
    p_hat = _proyeccion_base(x_point, cam, plano_cercano)
    if p_hat is None:
        return None
    nc = np.asarray(nc, dtype=np.float64).reshape(-1, 2)
    return [FrustumSample(tuple(p_hat + desplazamiento), 'estrecho', radio=radio_estrecho, centro=tuple(p_hat))
            for desplazamiento in nc]


def radio_amplio(x_point: np.ndarray, cam: VistaCamara, radio_amplio_max: float) -> float:
    """Ṙ = Ṙ_max / ‖x − x_c‖."""
    distancia = float(np.linalg.norm(np.asarray(x_point, dtype=np.float64) - cam.centro))
    if distancia == 0.0:
        logger.error(f"Punto {x_point} coincidente con el centro de la vista {cam.id}.")
        raise ErrorGeometriaDegenerada("El punto coincide con el centro de la cámara.")
    return radio_amplio_max / distancia


def broad_projection(x_point: np.ndarray, cam: VistaCamara, bc: np.ndarray, radio_amplio_max: float,
                     plano_cercano: float = 0.01) -> Optional[List[FrustumSample]]:
    """
    Muestras del frustum amplio: bc_i ⊙ p̂ en píxeles del mapa, con radio
    Ṙ = Ṙ_max / ‖x − x_c‖.

    Raises:
        ErrorGeometriaDegenerada: Si el punto coincide con el centro de la cámara.
    """
    radio = radio_amplio(x_point, cam, radio_amplio_max)
    p_hat = _proyeccion_base(x_point, cam, plano_cercano)
    if p_hat is None:
        return None
    bc = np.asarray(bc, dtype=np.float64).reshape(-1, 2)
    return [FrustumSample(tuple(factor * p_hat), 'amplio', radio=radio, centro=tuple(p_hat)) for factor in bc]


# ============================================================
# Muestreador por lotes
# ============================================================

@dataclass
class EstadoMuestreo:
    """Intermedios del forward por lotes del muestreador."""
    p_hat: np.ndarray
    radios_amplios: np.ndarray
    visibles: np.ndarray
    omega_n: List[np.ndarray]
    omega_b: List[np.ndarray]
    piramide: PiramideCaracteristicas
    registros: Dict[Tuple[int, bool], RegistroBilineal] = field(default_factory=dict)
    medias: Dict[Tuple[int, bool], np.ndarray] = field(default_factory=dict)


@dataclass
class GradientesMuestreo:
    nc: np.ndarray
    bc: np.ndarray
    omega_n: List[np.ndarray]
    omega_b: List[np.ndarray]
    mapa: np.ndarray


class MuestreadorMicroMacro:
    """
    Calcula f_r = f^n_0 ⊕ f^b_0 ⊕ … ⊕ f^n_M ⊕ f^b_M para un lote de anclas en una vista.

    En el nivel 0 cada mitad es la media de las k_s muestras sobre los mapas base
    0 y 1. En el nivel m se muestrean los 4^m sub-mapas en uv/2^m y se mezclan con
    los pesos ω del ancla. Las anclas detrás del plano cercano reciben f_r = 0.
    """

    def __init__(self, config: ConfiguracionEscena):
        self.config = config

    def forward(self, centros: np.ndarray, nc: np.ndarray, bc: np.ndarray,
                omega_n: List[np.ndarray], omega_b: List[np.ndarray], vista: VistaCamara,
                piramide: PiramideCaracteristicas) -> Tuple[np.ndarray, EstadoMuestreo]:
        """
        Args:
            centros: (A, 3). nc, bc: (A, k_s, 2). omega_n[m-1], omega_b[m-1]: (A, 4^m).

        Returns:
            (f_r (A, n_r), estado para el backward).
        """
        cfg = self.config
        if piramide.M != cfg.M or piramide.canales * (2 * cfg.M + 2) != cfg.n_r:
            logger.error(f"Pirámide con M={piramide.M} y {piramide.canales} canales para la configuración {cfg.M}/{cfg.n_r}.")
            raise ErrorConfiguracion("La pirámide no coincide con la configuración de la escena.")
        A = centros.shape[0]
        k_s = nc.shape[1]
        _, alto_mapa, ancho_mapa = piramide.forma_mapa
        uv, z = vista.proyectar(centros)
        visibles = z > cfg.plano_cercano
        p_hat = uv * np.array([ancho_mapa / vista.ancho, alto_mapa / vista.alto])
        distancias = np.linalg.norm(centros - vista.centro[None, :], axis=1)
        if np.any(distancias == 0.0):
            logger.error(f"Un ancla coincide con el centro de la vista {vista.id}.")
            raise ErrorGeometriaDegenerada("Ancla coincidente con el centro de la cámara.")
        estado = EstadoMuestreo(p_hat=p_hat, radios_amplios=cfg.radio_amplio_max / distancias,
                                visibles=visibles, omega_n=omega_n, omega_b=omega_b, piramide=piramide)
        muestras = {False: p_hat[:, None, :] + nc, True: bc * p_hat[:, None, :]}

        trozos = []
        for m in range(cfg.M + 1):
            for amplio in (False, True):
                pila = piramide.mapa_de_nivel(m, amplio)
                J, C, h, w = pila.shape
                uv_nivel = (muestras[amplio] / 2 ** m).reshape(A * k_s, 2)
                valores, registro = muestrear_bilineal(pila.reshape(J * C, h, w), uv_nivel)
                media = valores.reshape(A, k_s, J, C).mean(axis=1)
                if m == 0:
                    f = media[:, 0, :]
                else:
                    pesos = (omega_b if amplio else omega_n)[m - 1]
                    f = np.einsum('aj,ajc->ac', pesos, media)
                trozos.append(np.where(visibles[:, None], f, 0.0))
                estado.registros[(m, amplio)] = registro
                estado.medias[(m, amplio)] = media
        return np.concatenate(trozos, axis=1), estado

    def backward(self, estado: EstadoMuestreo, d_fr: np.ndarray, k_s: int) -> GradientesMuestreo:
        """Retropropaga dL/df_r hacia nc, bc, ω y F^MAP."""
        cfg = self.config
        piramide = estado.piramide
        A = d_fr.shape[0]
        C = piramide.canales
        d_fr = np.where(estado.visibles[:, None], d_fr, 0.0)
        d_muestras = {False: np.zeros((A, k_s, 2)), True: np.zeros((A, k_s, 2))}
        d_omega = {False: [np.zeros_like(w) for w in estado.omega_n],
                   True: [np.zeros_like(w) for w in estado.omega_b]}
        gradientes_niveles: Dict[Tuple[int, bool], np.ndarray] = {}

        trozo = 0
        for m in range(cfg.M + 1):
            for amplio in (False, True):
                d_f = d_fr[:, trozo * C:(trozo + 1) * C]
                trozo += 1
                pila = piramide.mapa_de_nivel(m, amplio)
                J, _, h, w = pila.shape
                media = estado.medias[(m, amplio)]
                if m == 0:
                    d_media = d_f[:, None, :]
                else:
                    pesos = (estado.omega_b if amplio else estado.omega_n)[m - 1]
                    d_omega[amplio][m - 1] = np.einsum('ac,ajc->aj', d_f, media)
                    d_media = pesos[:, :, None] * d_f[:, None, :]
                d_valores = np.broadcast_to(d_media[:, None, :, :] / k_s, (A, k_s, J, C)).reshape(A * k_s, J * C)
                registro = estado.registros[(m, amplio)]
                plano = pila.reshape(J * C, h, w)
                gradientes_niveles[(m, amplio)] = retropropagar_bilineal(registro, d_valores).reshape(J, C, h, w)
                d_uv = gradiente_uv_bilineal(plano, registro, d_valores).reshape(A, k_s, 2)
                d_muestras[amplio] += d_uv / 2 ** m

        return GradientesMuestreo(
            nc=d_muestras[False],
            bc=d_muestras[True] * estado.p_hat[:, None, :],
            omega_n=d_omega[False],
            omega_b=d_omega[True],
            mapa=piramide.gradiente_mapa(gradientes_niveles),
        )

    @staticmethod
    def firma(estado: EstadoMuestreo) -> List[np.ndarray]:
        """Celdas y pinzados de todos los muestreos bilineales, más la máscara de visibilidad."""
        firma = [estado.visibles]
        for clave in sorted(estado.registros):
            r = estado.registros[clave]
            firma.extend([r.x0, r.y0, r.pinzado_u, r.pinzado_v])
        return firma

    # --- Utilidades por ancla ---

    def muestras_frustum(self, ancla: Ancla, vista: VistaCamara) -> List[FrustumSample]:
        """Todas las muestras (niveles y sub-bandas) que usa un ancla en una vista."""
        cfg = self.config
        estrechas = narrow_projection(ancla.centro, vista, ancla.nc, cfg.radio_estrecho, cfg.plano_cercano)
        amplias = broad_projection(ancla.centro, vista, ancla.bc, cfg.radio_amplio_max, cfg.plano_cercano)
        if estrechas is None or amplias is None:
            return []
        resultado = []
        for m in range(cfg.M + 1):
            for muestra in estrechas + amplias:
                uv = (muestra.uv[0] / 2 ** m, muestra.uv[1] / 2 ** m)
                for j in range(4 ** m):
                    resultado.append(FrustumSample(uv, muestra.tipo, m, j, muestra.radio, muestra.centro))
        return resultado


def refined_feature(anchor: Ancla, pyramid: PiramideCaracteristicas, cam: VistaCamara,
                    config: ConfiguracionEscena) -> np.ndarray:
    """
    f_r (n_r,) de un ancla en una vista; envoltorio del forward por lotes.

    Raises:
        ErrorConfiguracion: Si la pirámide no coincide con la configuración.
    """
    f_r, _ = MuestreadorMicroMacro(config).forward(
        anchor.centro[None, :], anchor.nc[None], anchor.bc[None],
        [w[None] for w in anchor.omega_n], [w[None] for w in anchor.omega_b], cam, pyramid)
    return f_r[0]
