"""
Particionado de la escena: división inicial en rejilla, asignación de cámaras
guiada por estadísticas de puntos (etapa 1) y por sensibilidad de render (etapa 2).
"""

import logging
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from model.errores import ErrorConfiguracion, ErrorEntradaInvalida, ErrorGeometriaDegenerada
from model.escena.vista_camara import VistaCamara
from model.particion.bloque import Bloque, PasoVoraz
from model.particion.tabla_visibilidad import TablaVisibilidad, supervision
from model.perdidas.metricas import ssim

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

CUANTIL_INFERIOR = 0.05
CUANTIL_SUPERIOR = 0.95
EXPANSION = 0.05

CentrosCamara = Union[Mapping[int, np.ndarray], Sequence[VistaCamara]]


def _centros_camara(cameras: CentrosCamara) -> Dict[int, np.ndarray]:
    if isinstance(cameras, Mapping):
        return {int(i): np.asarray(c, dtype=np.float64).reshape(3) for i, c in cameras.items()}
    return {v.id: v.centro for v in cameras}


def ejes_suelo(points: np.ndarray) -> Tuple[int, int]:
    """Los dos ejes de mayor extensión, en orden creciente de índice."""
    extension = points.max(axis=0) - points.min(axis=0)
    mayores = np.argsort(-extension, kind='stable')[:2]
    return int(min(mayores)), int(max(mayores))


def _bordes(q_min: float, q_max: float, divisiones: int) -> List[Tuple[float, float, float, float]]:
    """(celda_min, celda_max, expandido_min, expandido_max) por división, con ±∞ en los extremos."""
    cortes = np.linspace(q_min, q_max, divisiones + 1)
    resultado = []
    for i in range(divisiones):
        lo, hi = float(cortes[i]), float(cortes[i + 1])
        margen = EXPANSION * (hi - lo)
        celda_lo = -np.inf if i == 0 else lo
        celda_hi = np.inf if i == divisiones - 1 else hi
        exp_lo = -np.inf if i == 0 else lo - margen
        exp_hi = np.inf if i == divisiones - 1 else hi + margen
        resultado.append((celda_lo, celda_hi, exp_lo, exp_hi))
    return resultado


def initial_division(points: np.ndarray, cameras: CentrosCamara, M: int, N: int,
                     centros_anclas: Optional[np.ndarray] = None,
                     ejes: Optional[Tuple[int, int]] = None) -> List[Bloque]:
    """
    División inicial en una rejilla M×N sobre los dos ejes del suelo.

    Los límites salen de los cuantiles 0.05/0.95 de los puntos; cada celda se
    expande un 5% de su arista por lado y las celdas exteriores se extienden a ±∞.
    Puntos y anclas pertenecen a todo bloque expandido que los contenga; las
    cámaras se asignan solo si su centro cae estrictamente dentro de la celda.

    Raises:
        ErrorEntradaInvalida: Con menos de 2 puntos.
        ErrorConfiguracion: Si M o N son < 1.
        ErrorGeometriaDegenerada: Si la extensión en un eje del suelo es nula.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if points.shape[0] < 2:
        logger.error("La división inicial necesita al menos 2 puntos.")
        raise ErrorEntradaInvalida("Se necesitan al menos 2 puntos.")
    if M < 1 or N < 1:
        raise ErrorConfiguracion(f"La rejilla debe ser al menos 1×1 (recibido {M}×{N}).")
    ejes = ejes_suelo(points) if ejes is None else (int(ejes[0]), int(ejes[1]))
    cuantiles = np.quantile(points[:, list(ejes)], [CUANTIL_INFERIOR, CUANTIL_SUPERIOR], axis=0)
    if np.any(cuantiles[1] - cuantiles[0] <= 0):
        logger.error(f"Extensión degenerada en los ejes {ejes}: {cuantiles}")
        raise ErrorGeometriaDegenerada("Los puntos no tienen extensión en alguno de los ejes del suelo.")

    centros = _centros_camara(cameras)
    ids_camaras = sorted(centros)
    matriz_camaras = np.stack([centros[c] for c in ids_camaras]) if ids_camaras else np.zeros((0, 3))
    bordes_a = _bordes(cuantiles[0, 0], cuantiles[1, 0], M)
    bordes_b = _bordes(cuantiles[0, 1], cuantiles[1, 1], N)

    bloques = []
    for i, (ca_lo, ca_hi, ea_lo, ea_hi) in enumerate(bordes_a):
        for j, (cb_lo, cb_hi, eb_lo, eb_hi) in enumerate(bordes_b):
            bloque = Bloque(id=i * N + j, fila=i, columna=j, ejes=ejes,
                            limites=(ea_lo, ea_hi, eb_lo, eb_hi), limites_celda=(ca_lo, ca_hi, cb_lo, cb_hi))
            bloque.puntos = [int(p) for p in np.flatnonzero(bloque.contiene(points))]
            if centros_anclas is not None and len(centros_anclas):
                bloque.anclas = [int(a) for a in np.flatnonzero(bloque.contiene(centros_anclas))]
            if ids_camaras:
                dentro = bloque.contiene(matriz_camaras, expandido=False, estricto=True)
                for indice in np.flatnonzero(dentro):
                    bloque.asignar_camara(ids_camaras[indice], 'inicial')
            bloques.append(bloque)
    logger.info(f"División inicial {M}×{N} en ejes {ejes}: "
                f"{[len(b.puntos) for b in bloques]} puntos por bloque.")
    return bloques


def actualizar_supervision(bloque: Bloque, tabla: TablaVisibilidad) -> Bloque:
    bloque.n_vis = supervision(bloque.puntos, list(bloque.camaras), tabla)
    return bloque


def objetivo_supervision(umbral: float) -> int:
    """Menor entero t con N_vis < τ ⇔ N_vis < t para todo N_vis entero."""
    return max(0, int(np.ceil(umbral)))


def _compensar(block: Bloque, vis: TablaVisibilidad, objetivo: int):
    for p in block.puntos:
        if len(vis.visibles[p]) < objetivo:
            for camara in sorted(vis.visibles[p]):
                block.asignar_camara(camara, 'etapa1_directa')
    actualizar_supervision(block, vis)


def _voraz(block: Bloque, vis: TablaVisibilidad, objetivo: int, disponibles: set):
    candidatas = sorted(disponibles - set(block.camaras))
    while candidatas:
        pendientes = [p for p in block.puntos if block.n_vis[p] < objetivo]
        ganancias = {c: sum(1 for p in pendientes if c in vis.visibles[p]) for c in candidatas}
        maxima = max(ganancias.values())
        if maxima == 0:
            break
        elegida = min(c for c, g in ganancias.items() if g == maxima)
        block.asignar_camara(elegida, 'etapa1_voraz')
        block.historial_voraz.append(PasoVoraz(elegida, maxima, ganancias, objetivo))
        for p in block.puntos:
            if elegida in vis.visibles[p]:
                block.n_vis[p] += 1
        candidatas.remove(elegida)


def psg_stage1(block: Bloque, vis: TablaVisibilidad,
               unassigned_cameras: Optional[Sequence[int]] = None) -> Bloque:
    """
    Etapa 1 del particionado guiado por puntos (modifica y devuelve el bloque).

    Como N_vis es entero, τ solo actúa a través de t = ⌈τ⌉. La etapa recorre los
    objetivos s = 1..t y en cada uno aplica, sobre lo asignado en s − 1:

    (a) Compensación: cada punto del bloque con |V(p)| < s aporta todas sus cámaras.
    (b) Bucle voraz: se añade la cámara de mayor ganancia
        G_j = #{p ∈ B : N_vis(p) < s y c_j ∈ V(p)}, con empate a favor del id
        menor, hasta que la ganancia máxima es 0.

    El resultado para t contiene al de cualquier objetivo menor, así que aumentar
    κ nunca quita cámaras. En el último nivel se cumple la condición de parada
    respecto a τ: cada punto alcanza τ o tiene asignadas todas sus cámaras.
    """
    objetivo = objetivo_supervision(vis.umbral)
    if unassigned_cameras is None:
        unassigned_cameras = vis.camaras()
    disponibles = set(int(c) for c in unassigned_cameras)
    block.historial_voraz = []
    actualizar_supervision(block, vis)
    for nivel in range(1, objetivo + 1):
        _compensar(block, vis, nivel)
        _voraz(block, vis, nivel, disponibles)
    logger.info(f"Bloque {block.id}: {len(block.camaras)} cámaras tras la etapa 1 "
                f"(objetivo {objetivo}, {len(block.historial_voraz)} voraces).")
    return block


def psg_stage2(blocks: List[Bloque], cameras: Sequence[int],
               renderizar: Callable[[int, Sequence[int]], np.ndarray],
               gaussianas_de_bloque: Callable[[Bloque], Sequence[int]], eta: float) -> List[Bloque]:
    """
    Etapa 2: una cámara j se añade al bloque m si 1 − SSIM(Î_j, Î_j^{∖m}) > η,
    donde Î_j^{∖m} es el render sin las Gaussianas del bloque m.

    Args:
        blocks: Bloques a actualizar (se modifican).
        cameras: Ids de las cámaras candidatas.
        renderizar: renderizar(id_camara, excluidos) → imagen H×W×3.
        gaussianas_de_bloque: Índices de las Gaussianas de un bloque.
        eta: Umbral de disimilitud.
    """
    completos: Dict[int, np.ndarray] = {}
    for bloque in blocks:
        excluidas = list(gaussianas_de_bloque(bloque))
        if not excluidas:
            continue
        for camara in sorted(cameras):
            if camara in bloque.camaras:
                continue
            if camara not in completos:
                completos[camara] = renderizar(camara, [])
            sin_bloque = renderizar(camara, excluidas)
            disimilitud = 1.0 - ssim(completos[camara], sin_bloque)
            if disimilitud > eta:
                bloque.asignar_camara(camara, 'etapa2')
                logger.debug(f"Bloque {bloque.id}: cámara {camara} añadida (1-SSIM={disimilitud:.4f}).")
    return blocks


def histograma_supervision(blocks: Sequence[Bloque]) -> Dict[int, Dict[int, int]]:
    """Por bloque, número de puntos con cada valor de N_vis."""
    histograma: Dict[int, Dict[int, int]] = {}
    for bloque in blocks:
        cuentas: Dict[int, int] = {}
        for n in bloque.n_vis.values():
            cuentas[n] = cuentas.get(n, 0) + 1
        histograma[bloque.id] = dict(sorted(cuentas.items()))
    return histograma


def particionar(points: np.ndarray, cameras: Sequence[VistaCamara], tabla: TablaVisibilidad, M: int, N: int,
                centros_anclas: Optional[np.ndarray] = None, etapa1: bool = True) -> List[Bloque]:
    """División inicial seguida (opcionalmente) de la etapa 1 en todos los bloques."""
    bloques = initial_division(points, cameras, M, N, centros_anclas)
    for bloque in bloques:
        if etapa1:
            psg_stage1(bloque, tabla)
        else:
            actualizar_supervision(bloque, tabla)
    return bloques
