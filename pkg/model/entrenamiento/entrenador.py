"""
Bucle de entrenamiento a escala de escritorio, ajuste de apariencia de vistas
retenidas, evaluación y comprobación de gradientes por diferencias finitas.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from model.entrenamiento.configuracion_entrenamiento import ConfiguracionEntrenamiento
from model.entrenamiento.cronometro import Cronometro
from model.entrenamiento.modelo_entrenable import CONGELADOS, ModeloEntrenable
from model.entrenamiento.optimizador_adam import OptimizadorAdam
from model.entrenamiento.registro_entrenamiento import EntradaRegistro, RegistroEntrenamiento
from model.errores import ErrorConfiguracion, ErrorEntradaInvalida, ErrorNumerico
from model.escena.paquete_escena import PaqueteEscena
from model.particion.bloque import Bloque, bloque_por_id
from model.particion.calendario_rotacion import ESCENA_COMPLETA, CalendarioRotacion, rotational_schedule
from model.perdidas.metricas import l1, psnr, ssim

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

# Tensores de las anclas a los que se aplica la máscara del bloque alojado
TENSORES_POR_ANCLA = ('f_v', 'nc', 'bc', 'opacidades')


# ============================================================
# Entrenamiento
# ============================================================

def _comprobar_finitos(modelo: ModeloEntrenable, valor: float, gradientes: Dict[str, np.ndarray],
                       iteracion: int, config: ConfiguracionEntrenamiento):
    """Aborta con un volcado .npz si la pérdida o algún gradiente no es finito."""
    malos = [n for n, g in gradientes.items() if not np.all(np.isfinite(g))]
    malos += [n for n, t in modelo.parametros.items() if not np.all(np.isfinite(t))]
    if np.isfinite(valor) and not malos:
        return
    ruta: Optional[str] = config.ruta_diagnostico
    volcado = {f'param.{n}': t for n, t in modelo.volcar().items()}
    volcado.update({f'grad.{n}': g for n, g in gradientes.items()})
    volcado['perdida'] = np.array([valor])
    try:
        np.savez(ruta, **volcado)
    except OSError as e:
        logger.error(f"No se pudo escribir el volcado de diagnóstico: {e}")
        ruta = None
    logger.error(f"Valores no finitos en la iteración {iteracion} (pérdida {valor}); tensores: {sorted(set(malos))}")
    raise ErrorNumerico(f"Pérdida o gradientes no finitos en la iteración {iteracion}.",
                        ruta_diagnostico=ruta, tensores_no_finitos=sorted(set(malos)))


def _mascaras_bloque(modelo: ModeloEntrenable, bloque: Optional[Bloque]) -> Dict[str, np.ndarray]:
    if bloque is None:
        return {}
    filas = np.zeros(modelo.num_anclas, dtype=bool)
    filas[[a for a in bloque.anclas if a < modelo.num_anclas]] = True
    nombres = list(TENSORES_POR_ANCLA) + [n for n in modelo.parametros if n.startswith('omega_')]
    return {n: filas for n in nombres}


class SelectorVistas:
    """
    Decide, para cada iteración, el bloque alojado y la vista a usar: round-robin
    sobre las vistas de entrenamiento sin particionado, o sobre las cámaras del
    bloque que dicta el calendario de rotación.
    """

    def __init__(self, escena: PaqueteEscena, calendario: Optional[CalendarioRotacion] = None,
                 bloques: Optional[Sequence[Bloque]] = None):
        self.ids_entrenamiento = [v.id for v in escena.vistas_entrenamiento]
        if not self.ids_entrenamiento:
            logger.error("La escena no tiene vistas de entrenamiento.")
            raise ErrorEntradaInvalida("Se necesita al menos una vista de entrenamiento.")
        self.calendario = calendario
        self.bloques = list(bloques or [])
        self._contadores: Dict[int, int] = {}

    def _siguiente(self, clave: int, candidatas: List[int]) -> int:
        n = self._contadores.get(clave, 0)
        self._contadores[clave] = n + 1
        return candidatas[n % len(candidatas)]

    def seleccionar(self, iteracion: int) -> Tuple[int, int, int, int, Optional[Bloque]]:
        """(periodo, ranura, id_bloque, id_vista, bloque) de la iteración."""
        if self.calendario is None:
            return 0, 0, ESCENA_COMPLETA, self._siguiente(ESCENA_COMPLETA, self.ids_entrenamiento), None
        periodo, ranura, id_bloque = self.calendario.bloque_para_iteracion(iteracion)
        if id_bloque == ESCENA_COMPLETA:
            return periodo, ranura, id_bloque, self._siguiente(ESCENA_COMPLETA, self.ids_entrenamiento), None
        bloque = bloque_por_id(self.bloques, id_bloque)
        if bloque is None:
            raise ErrorEntradaInvalida(f"El calendario referencia el bloque {id_bloque}, que no existe.")
        candidatas = [c for c in bloque.ids_camaras() if c in self.ids_entrenamiento] or self.ids_entrenamiento
        return periodo, ranura, id_bloque, self._siguiente(id_bloque, candidatas), bloque


def train(escena: PaqueteEscena, config: ConfiguracionEntrenamiento,
          bloques: Optional[Sequence[Bloque]] = None) -> Tuple[PaqueteEscena, RegistroEntrenamiento]:
    """
    Optimiza una copia de la escena.

    En cada iteración se elige una vista (round-robin o según el calendario de
    rotación si hay bloques), se calcula f_r, los colores y el render, se evalúa
    la pérdida total y se aplica un paso de Adam con tasas de decaimiento
    exponencial a todos los tensores entrenables que intervienen. Con bloques,
    los tensores por ancla solo se actualizan en las anclas del bloque alojado.

    Returns:
        (escena optimizada, registro con una entrada por iteración).

    Raises:
        ErrorEntradaInvalida: Si la escena no tiene vistas de entrenamiento.
        ErrorConfiguracion: Si el calendario no es compatible con los bloques.
        ErrorNumerico: Si aparece un NaN/Inf (con volcado de diagnóstico).
    """
    escena.validar()
    copia = escena.copiar()
    copia.config = config.configuracion_escena(escena.config)
    registro = RegistroEntrenamiento()
    calendario = None
    if bloques:
        n_iter = copia.config.n_iter_rotacion
        if n_iter < config.num_ranuras:
            logger.error(f"N_iter={n_iter} menor que el número de ranuras {config.num_ranuras}.")
            raise ErrorConfiguracion("N_iter debe ser >= número de ranuras para visitar todas en cada periodo.")
        calendario = rotational_schedule(len(bloques), config.num_ranuras, n_iter, config.iteraciones,
                                         config.alternar_escena_completa)
    selector = SelectorVistas(copia, calendario, bloques)
    if config.iteraciones == 0:
        logger.info("0 iteraciones: la escena se devuelve sin cambios.")
        return copia, registro

    modelo = ModeloEntrenable(copia)
    optimizador = OptimizadorAdam(config)
    cronometro = Cronometro()
    logger.info(f"Entrenando {config.iteraciones} iteraciones sobre {len(selector.ids_entrenamiento)} vistas"
                f"{f' y {len(bloques)} bloques' if bloques else ''}.")
    for i in tqdm(range(config.iteraciones), desc='Entrenando', disable=not config.barra_progreso):
        periodo, ranura, id_bloque, id_vista, bloque = selector.seleccionar(i)
        with cronometro.medir('forward_backward'):
            resultado = modelo.evaluar(id_vista)
        gradientes = {n: g for n, g in resultado.gradientes.items() if n in modelo.parametros}
        _comprobar_finitos(modelo, resultado.desglose.total, gradientes, i, config)
        with cronometro.medir('actualizacion'):
            optimizador.paso(modelo.parametros, gradientes, i, _mascaras_bloque(modelo, bloque))
            modelo.recortar_opacidades()
        registro.agregar(EntradaRegistro(i, periodo, ranura, id_bloque, id_vista, resultado.desglose))
        if (i + 1) % config.intervalo_log == 0:
            logger.info(f"Iteración {i + 1}/{config.iteraciones}: pérdida {resultado.desglose.total:.6f} "
                        f"(vista {id_vista}, bloque {id_bloque}).")
        else:
            logger.debug(f"Iteración {i}: {resultado.desglose.a_diccionario()}")
    registro.tiempos = dict(cronometro.tiempos)
    return modelo.a_escena(), registro


# ============================================================
# Evaluación y ajuste de apariencia
# ============================================================

def ajustar_apariencia(escena: PaqueteEscena, id_vista: int, config: ConfiguracionEntrenamiento,
                       iteraciones: Optional[int] = None) -> PaqueteEscena:
    """
    Optimiza solo f_g y F^MAP de una vista (todo lo demás congelado). Sustituye
    al codificador de imagen para vistas retenidas. Modifica y devuelve la escena.
    """
    iteraciones = config.iteraciones_ajuste_apariencia if iteraciones is None else iteraciones
    modelo = ModeloEntrenable(escena)
    tasas = {'apariencia': config.tasas.get('apariencia', (0.0, 0.0))}
    optimizador = OptimizadorAdam(ConfiguracionEntrenamiento(iteraciones=max(iteraciones, 1), tasas=tasas))
    nombres = (f'f_g.{id_vista}', f'mapa.{id_vista}')
    for i in range(iteraciones):
        resultado = modelo.evaluar(id_vista)
        optimizador.paso(modelo.parametros, {n: resultado.gradientes[n] for n in nombres}, i)
    vista = escena.vista(id_vista)
    vista.f_g = modelo.parametros[nombres[0]].copy()
    vista.mapa = modelo.parametros[nombres[1]].copy()
    logger.info(f"Apariencia de la vista {id_vista} ajustada en {iteraciones} iteraciones.")
    return escena


def evaluar_vistas(escena: PaqueteEscena, ids_vistas: Optional[Sequence[int]] = None) -> Dict[int, Dict[str, float]]:
    """PSNR, SSIM, L1 y pérdida total de cada vista con imagen de referencia."""
    modelo = ModeloEntrenable(escena)
    ids = [v.id for v in escena.vistas if v.imagen_gt is not None] if ids_vistas is None else list(ids_vistas)
    metricas = {}
    for id_vista in ids:
        resultado = modelo.evaluar(id_vista, calcular_gradientes=False)
        gt = escena.vista(id_vista).imagen_gt
        metricas[id_vista] = {'psnr': psnr(resultado.imagen, gt), 'ssim': ssim(resultado.imagen, gt),
                              'l1': l1(resultado.imagen, gt), 'perdida': resultado.desglose.total}
    return metricas


# ============================================================
# Comprobación de gradientes
# ============================================================

FAMILIAS_GRADCHECK = ('colores', 'opacidades', 'f_v', 'f_r', 'f_g', 'nc', 'bc', 'omega_n', 'omega_b',
                      'omega_r', 'omega_v', 'hrfn', 'mapa') + CONGELADOS

PASO_DIFERENCIAS = 1e-4
SUELO_ERROR_RELATIVO = 1e-6
INTENTOS_POR_MUESTRA = 20


@dataclass
class ComparacionGradiente:
    tensor: str
    indice: Tuple[int, ...]
    analitico: float
    numerico: float
    error_relativo: float


@dataclass
class InformeGradiente:
    """Comparaciones por familia y el máximo error relativo global."""
    comparaciones: Dict[str, List[ComparacionGradiente]] = field(default_factory=dict)

    def error_familia(self, familia: str) -> float:
        return max((c.error_relativo for c in self.comparaciones.get(familia, [])), default=0.0)

    @property
    def max_error(self) -> float:
        return max((self.error_familia(f) for f in self.comparaciones), default=0.0)


def _tensores_de_familia(modelo: ModeloEntrenable, familia: str, id_vista: int) -> List[str]:
    if familia in ('colores', 'f_r', 'opacidades', 'f_v', 'nc', 'bc'):
        return [familia]
    if familia in ('omega_n', 'omega_b'):
        return [n for n in modelo.parametros if n.startswith(familia + '.')]
    if familia in ('omega_r', 'omega_v'):
        return [f'hrfn.{familia}']
    if familia == 'hrfn':
        return [n for n in modelo.parametros if n.startswith('hrfn.') and not n.startswith('hrfn.omega')]
    if familia in ('f_g', 'mapa'):
        return [f'{familia}.{id_vista}']
    if familia in CONGELADOS:
        return [familia]
    raise ErrorEntradaInvalida(f"Familia de gradientes desconocida: '{familia}'.")


def _misma_firma(a: List[np.ndarray], b: List[np.ndarray]) -> bool:
    return len(a) == len(b) and all(x.shape == y.shape and np.array_equal(x, y) for x, y in zip(a, b))


def _error_relativo(analitico: float, numerico: float) -> float:
    return abs(analitico - numerico) / max(abs(analitico), abs(numerico), SUELO_ERROR_RELATIVO)


def gradcheck(escena: PaqueteEscena, id_vista: int, selector: Union[str, Sequence[str]] = FAMILIAS_GRADCHECK,
              muestras: int = 6, semilla: int = 0, h: float = PASO_DIFERENCIAS) -> InformeGradiente:
    """
    Compara dL/dθ analítico con diferencias centrales (L(θ+h) − L(θ−h)) / 2h en
    un subconjunto muestreado de cada familia de parámetros.

    Solo se aceptan muestras cuyas decisiones discretas del forward (firma) son
    idénticas en θ−h, θ y θ+h; las que caen sobre un punto no diferenciable se
    sustituyen por otro índice. Las familias congeladas informan gradiente 0 sin
    evaluar diferencias.

    Returns:
        Informe con el error relativo |a − n| / max(|a|, |n|, 1e-6) de cada muestra.
    """
    familias = [selector] if isinstance(selector, str) else list(selector)
    modelo = ModeloEntrenable(escena.copiar())
    base = modelo.evaluar(id_vista)
    rng = np.random.default_rng(semilla)
    informe = InformeGradiente()

    for familia in familias:
        comparaciones: List[ComparacionGradiente] = []
        for nombre in _tensores_de_familia(modelo, familia, id_vista):
            if familia in CONGELADOS:
                tensor = modelo.tensor_congelado(nombre)
                for plano in rng.choice(tensor.size, size=min(muestras, tensor.size), replace=False):
                    indice = tuple(int(i) for i in np.unravel_index(plano, tensor.shape))
                    comparaciones.append(ComparacionGradiente(nombre, indice, 0.0, 0.0, 0.0))
                continue
            comparaciones.extend(_comparar_tensor(modelo, base, nombre, id_vista, muestras, rng, h))
        informe.comparaciones[familia] = comparaciones
        logger.info(f"gradcheck '{familia}': error relativo máximo {informe.error_familia(familia):.3e} "
                    f"en {len(comparaciones)} muestras.")
    return informe


def _comparar_tensor(modelo: ModeloEntrenable, base, nombre: str, id_vista: int, muestras: int,
                     rng: np.random.Generator, h: float) -> List[ComparacionGradiente]:
    sustituible = nombre in ('colores', 'f_r')
    valor_base = (base.colores if nombre == 'colores' else base.f_r) if sustituible else modelo.parametros[nombre]
    analitico = base.gradientes[nombre]

    def perdida(delta: float, indice) -> Tuple[float, List[np.ndarray]]:
        if sustituible:
            perturbado = valor_base.copy()
            perturbado[indice] += delta
            r = modelo.evaluar(id_vista, sustituciones={nombre: perturbado}, calcular_gradientes=False)
        else:
            original = valor_base[indice]
            valor_base[indice] = original + delta
            try:
                r = modelo.evaluar(id_vista, calcular_gradientes=False)
            finally:
                valor_base[indice] = original
        return r.desglose.total, r.firma

    firma_base = modelo.evaluar(id_vista, sustituciones={nombre: valor_base} if sustituible else None,
                                calcular_gradientes=False).firma
    # Preferir índices con gradiente no nulo; si no hay, cualquiera
    candidatos = np.flatnonzero(analitico.reshape(-1) != 0.0)
    if candidatos.size == 0:
        candidatos = np.arange(analitico.size)
    candidatos = rng.permutation(candidatos)

    comparaciones = []
    intentos = 0
    for plano in candidatos:
        if len(comparaciones) >= muestras or intentos >= muestras * INTENTOS_POR_MUESTRA:
            break
        intentos += 1
        indice = tuple(int(i) for i in np.unravel_index(plano, valor_base.shape))
        mas, firma_mas = perdida(+h, indice)
        menos, firma_menos = perdida(-h, indice)
        if not (_misma_firma(firma_base, firma_mas) and _misma_firma(firma_base, firma_menos)):
            logger.debug(f"gradcheck: {nombre}{indice} sobre un punto no diferenciable; se descarta.")
            continue
        numerico = (mas - menos) / (2.0 * h)
        a = float(analitico[indice])
        comparaciones.append(ComparacionGradiente(nombre, indice, a, numerico, _error_relativo(a, numerico)))
    return comparaciones
