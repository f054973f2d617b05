"""
Rasterizador de referencia en CPU: ordenación por profundidad, composición alfa
de delante hacia atrás, render con exclusión y gradientes analíticos respecto a
colores y opacidades.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from model.errores import ErrorEntradaInvalida, ErrorEstado
from model.escena.nube_gaussianas import NubeGaussianas
from model.escena.vista_camara import VistaCamara
from model.render.splat2d import Splat2D, proyectar_nube

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

ALFA_MAXIMO = 0.99
ALFA_MINIMO = 1.0 / 255.0


@dataclass
class RegistroSplat:
    """Lo que el backward necesita de un splat compuesto."""
    indice: int
    caja: tuple
    G: np.ndarray
    alfa: np.ndarray
    transmitancia: np.ndarray
    usado: np.ndarray
    pinzado: np.ndarray


@dataclass
class EstadoRender:
    """Splats compuestos en orden de delante hacia atrás y los colores usados."""
    registros: List[RegistroSplat]
    colores: np.ndarray
    forma: tuple


@dataclass
class SalidaRender:
    """Imagen H×W×3, alfa acumulado H×W y, opcionalmente, el estado para el backward."""
    imagen: np.ndarray
    alfa: np.ndarray
    estado: Optional[EstadoRender] = None
    num_splats: int = 0


def _validar_entradas(nube: NubeGaussianas, colores: np.ndarray, opacidades: np.ndarray):
    if colores.shape != (len(nube), 3) or opacidades.shape != (len(nube),):
        logger.error(f"Longitudes incompatibles: {len(nube)} Gaussianas, colores {colores.shape}, "
                     f"opacidades {opacidades.shape}.")
        raise ErrorEntradaInvalida("Colores y opacidades deben alinearse con la lista de Gaussianas.")


def render(nube: NubeGaussianas, vista: VistaCamara, colores: np.ndarray, opacidades: np.ndarray,
           registrar: bool = False, splats: Optional[Sequence[Splat2D]] = None,
           excluidos: Iterable[int] = (), plano_cercano: float = 0.01) -> SalidaRender:
    """
    Compone Ĉ(p) = Σ_i ĉ_i α'_i Π_{j<i}(1 − α'_j) sobre fondo negro.

    α'_i = min(0.99, α_i · exp(-½ dᵀ cov2d⁻¹ d)); los splats con α'_i < 1/255 se
    omiten en ese píxel. El orden es por profundidad y, a igualdad, por índice.

    Args:
        nube: Gaussianas de la escena.
        vista: Cámara.
        colores: (N, 3). opacidades: (N,).
        registrar: Si True, guarda el estado necesario para backward_color_opacity.
        splats: Proyecciones precalculadas de la nube (se reutilizan entre iteraciones).
        excluidos: Índices de Gaussianas que no participan.

    Raises:
        ErrorEntradaInvalida: Si las longitudes no coinciden.
    """
    colores = np.asarray(colores, dtype=np.float64).reshape(-1, 3) if len(colores) else np.zeros((0, 3))
    opacidades = np.asarray(opacidades, dtype=np.float64).reshape(-1)
    _validar_entradas(nube, colores, opacidades)
    if splats is None:
        splats = proyectar_nube(nube, vista, plano_cercano)
    excluidos = set(int(i) for i in excluidos)
    orden = sorted((s for s in splats if s.indice not in excluidos), key=lambda s: (s.profundidad, s.indice))

    H, W = vista.alto, vista.ancho
    imagen = np.zeros((H, W, 3))
    T = np.ones((H, W))
    registros: List[RegistroSplat] = []
    for s in orden:
        x0, x1, y0, y1 = s.caja
        xs = np.arange(x0, x1 + 1) - s.media2d[0]
        ys = np.arange(y0, y1 + 1) - s.media2d[1]
        dx, dy = np.meshgrid(xs, ys)
        con = s.conica
        G = np.exp(-0.5 * (con[0, 0] * dx * dx + 2.0 * con[0, 1] * dx * dy + con[1, 1] * dy * dy))
        crudo = opacidades[s.indice] * G
        usado = crudo >= ALFA_MINIMO
        pinzado = crudo > ALFA_MAXIMO
        a = np.where(usado, np.minimum(crudo, ALFA_MAXIMO), 0.0)
        T_caja = T[y0:y1 + 1, x0:x1 + 1]
        imagen[y0:y1 + 1, x0:x1 + 1] += colores[s.indice][None, None, :] * (a * T_caja)[..., None]
        if registrar:
            registros.append(RegistroSplat(s.indice, s.caja, G, a, T_caja.copy(), usado, pinzado))
        T[y0:y1 + 1, x0:x1 + 1] = T_caja * (1.0 - a)

    estado = EstadoRender(registros, colores, (H, W)) if registrar else None
    return SalidaRender(imagen=imagen, alfa=1.0 - T, estado=estado, num_splats=len(orden))


def render_excluding(nube: NubeGaussianas, vista: VistaCamara, colores: np.ndarray, opacidades: np.ndarray,
                     excluded_gaussian_ids: Iterable[int], splats: Optional[Sequence[Splat2D]] = None,
                     plano_cercano: float = 0.01) -> SalidaRender:
    """
    Render sobre el complemento de `excluded_gaussian_ids`.

    Raises:
        ErrorEntradaInvalida: Si algún id no existe.
    """
    ids = [int(i) for i in excluded_gaussian_ids]
    desconocidos = [i for i in ids if i < 0 or i >= len(nube)]
    if desconocidos:
        logger.error(f"Ids de Gaussiana desconocidos: {desconocidos[:10]}")
        raise ErrorEntradaInvalida(f"Ids de Gaussiana fuera de rango: {desconocidos[:10]}")
    return render(nube, vista, colores, opacidades, splats=splats, excluidos=ids, plano_cercano=plano_cercano)


def backward_color_opacity(render_state: Optional[EstadoRender], grad_imagen: np.ndarray):
    """
    Gradientes exactos de la composición respecto a colores y opacidades base
    (α'_i = α_i · G_i con G_i constante).

    Se recorre de atrás hacia delante manteniendo S, el color acumulado detrás
    del splat actual: dĈ/dα'_i = ĉ_i T_i − S / (1 − α'_i).

    Returns:
        (dL/dĉ (N, 3), dL/dα (N,)).

    Raises:
        ErrorEstado: Si el render no se ejecutó con registro.
    """
    if render_state is None:
        logger.error("backward_color_opacity llamado sin estado de render registrado.")
        raise ErrorEstado("El render debe ejecutarse con registrar=True antes del backward.")
    N = render_state.colores.shape[0]
    d_colores = np.zeros((N, 3))
    d_opacidades = np.zeros(N)
    S = np.zeros(render_state.forma + (3,))
    for r in reversed(render_state.registros):
        x0, x1, y0, y1 = r.caja
        g = grad_imagen[y0:y1 + 1, x0:x1 + 1]
        S_caja = S[y0:y1 + 1, x0:x1 + 1]
        c = render_state.colores[r.indice]
        peso = r.alfa * r.transmitancia
        d_colores[r.indice] += np.einsum('hwc,hw->c', g, peso)
        d_a = np.einsum('hwc,hwc->hw', g, c[None, None, :] * r.transmitancia[..., None]
                        - S_caja / (1.0 - r.alfa)[..., None])
        derivable = r.usado & ~r.pinzado
        d_opacidades[r.indice] += float(np.sum(d_a * r.G * derivable))
        S[y0:y1 + 1, x0:x1 + 1] = S_caja + c[None, None, :] * peso[..., None]
    return d_colores, d_opacidades


def firma_render(render_state: EstadoRender) -> List[np.ndarray]:
    """Máscaras de omisión y pinzado por splat, para detectar cambios de rama."""
    firma: List[np.ndarray] = [np.array([r.indice for r in render_state.registros])]
    for r in render_state.registros:
        firma.extend([r.usado, r.pinzado])
    return firma
