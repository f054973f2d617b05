"""
Define la configuración del bucle de entrenamiento: iteraciones, tasas de
aprendizaje por familia de tensores con decaimiento exponencial, pesos de la
pérdida y parámetros del calendario de rotación.
"""

import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Any, ClassVar, Dict, Optional, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib  # type: ignore[no-redef]

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorConfiguracion

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

Tasa = Tuple[float, float]  # (inicio, fin)

FAMILIAS = ('anclas', 'f_v', 'opacidades', 'fusion', 'apariencia')

TASAS_POR_DEFECTO: Dict[str, Tasa] = {
    'anclas': (1e-4, 1e-5),       # nc, bc, ω^n, ω^b
    'f_v': (2.5e-3, 2.5e-4),
    'opacidades': (1e-2, 1e-3),
    'fusion': (5e-4, 5e-5),       # pesos HRFN, ω_r, ω_v
    'apariencia': (1e-4, 1e-6),   # f_g y F^MAP por vista
}


def familia_de_tensor(nombre: str) -> str:
    """Familia de tasas a la que pertenece un tensor entrenable."""
    if nombre in ('nc', 'bc') or nombre.startswith('omega_n.') or nombre.startswith('omega_b.'):
        return 'anclas'
    if nombre.startswith('hrfn.'):
        return 'fusion'
    if nombre.startswith('f_g.') or nombre.startswith('mapa.'):
        return 'apariencia'
    if nombre in ('f_v', 'opacidades'):
        return nombre
    raise ErrorConfiguracion(f"Tensor sin familia de tasas: '{nombre}'.")


@dataclass(frozen=True)
class ConfiguracionEntrenamiento:
    """
    Parámetros de `train`. Los pesos λ y N_iter son opcionales: si valen None se
    usan los de la configuración de la escena.
    """
    iteraciones: int = 2000
    tasas: Dict[str, Tasa] = field(default_factory=lambda: dict(TASAS_POR_DEFECTO))
    semilla: int = 0
    num_ranuras: int = 1
    n_iter_rotacion: Optional[int] = None
    alternar_escena_completa: bool = False
    lambda_ssim: Optional[float] = None
    lambda_1: Optional[float] = None
    lambda_proj: Optional[float] = None
    lambda_vol: Optional[float] = None
    intervalo_log: int = 100
    barra_progreso: bool = False
    ruta_diagnostico: str = 'diagnostico_nan.npz'
    iteraciones_ajuste_apariencia: int = 50

    # Tasas más altas para escenas sintéticas pequeñas que deben converger en pocos miles de pasos
    PARAMETROS_POR_PRESET: ClassVar[Dict[str, Dict[str, Any]]] = {
        'completo': {},
        'escritorio': {
            'tasas': {
                'anclas': (1e-2, 1e-3),
                'f_v': (1e-2, 1e-3),
                'opacidades': (5e-2, 5e-3),
                'fusion': (5e-3, 5e-4),
                'apariencia': (1e-2, 1e-4),
            },
        },
    }
    DEFAULT_PRESET: ClassVar[str] = 'completo'

    def __post_init__(self):
        if self.iteraciones < 0:
            self._fallar(f"iteraciones debe ser >= 0 (recibido {self.iteraciones}).")
        if self.num_ranuras < 1:
            self._fallar("num_ranuras debe ser >= 1.")
        if self.n_iter_rotacion is not None and self.n_iter_rotacion < 1:
            self._fallar("n_iter_rotacion debe ser >= 1.")
        if self.intervalo_log < 1:
            self._fallar("intervalo_log debe ser >= 1.")
        desconocidas = set(self.tasas) - set(FAMILIAS)
        if desconocidas:
            self._fallar(f"Familias de tasas desconocidas: {sorted(desconocidas)}.")
        for familia, (inicio, fin) in self.tasas.items():
            if inicio < 0 or fin < 0:
                self._fallar(f"Tasas negativas en '{familia}': {(inicio, fin)}.")
            if fin > inicio:
                self._fallar(f"La tasa final de '{familia}' supera a la inicial: {(inicio, fin)}.")
        for nombre in ('lambda_ssim', 'lambda_1', 'lambda_proj', 'lambda_vol'):
            valor = getattr(self, nombre)
            if valor is not None and valor < 0:
                self._fallar(f"{nombre} debe ser >= 0.")

    @staticmethod
    def _fallar(mensaje: str):
        logger.error(mensaje)
        raise ErrorConfiguracion(mensaje)

    # --- Tasas ---

    def tasa(self, familia: str, iteracion: int) -> float:
        """
        lr(t) = inicio·(fin/inicio)^(t/T). Una familia sin tasa configurada (o con
        inicio 0) queda congelada.
        """
        inicio, fin = self.tasas.get(familia, (0.0, 0.0))
        if inicio == 0.0:
            return 0.0
        if self.iteraciones <= 1:
            return inicio
        fraccion = iteracion / float(self.iteraciones)
        return inicio * (fin / inicio) ** fraccion

    def con_tasas_nulas(self) -> 'ConfiguracionEntrenamiento':
        return replace(self, tasas={f: (0.0, 0.0) for f in FAMILIAS})

    def configuracion_escena(self, base: ConfiguracionEscena) -> ConfiguracionEscena:
        """Aplica los pesos λ y N_iter sobrescritos a la configuración de la escena."""
        cambios = {nombre: getattr(self, nombre)
                   for nombre in ('lambda_ssim', 'lambda_1', 'lambda_proj', 'lambda_vol')
                   if getattr(self, nombre) is not None}
        if self.n_iter_rotacion is not None:
            cambios['n_iter_rotacion'] = self.n_iter_rotacion
        return base.con_cambios(**cambios) if cambios else base

    # --- Construcción ---

    @classmethod
    def desde_preset(cls, nombre: str, **overrides: Any) -> 'ConfiguracionEntrenamiento':
        if nombre not in cls.PARAMETROS_POR_PRESET:
            logger.warning(f"Preset de entrenamiento '{nombre}' no reconocido. Usando '{cls.DEFAULT_PRESET}'.")
            nombre = cls.DEFAULT_PRESET
        parametros = dict(cls.PARAMETROS_POR_PRESET[nombre])
        tasas = dict(TASAS_POR_DEFECTO)
        tasas.update(parametros.pop('tasas', {}))
        tasas.update(overrides.pop('tasas', {}))
        parametros.update(overrides)
        return cls(tasas=tasas, **parametros)

    @classmethod
    def desde_diccionario(cls, datos: Dict[str, Any]) -> 'ConfiguracionEntrenamiento':
        """
        Acepta la estructura de train.toml: una tabla [entrenamiento] con los campos
        escalares (y opcionalmente `preset`) y una tabla [tasas] con pares [inicio, fin].
        """
        seccion = dict(datos.get('entrenamiento', {}))
        preset = seccion.pop('preset', cls.DEFAULT_PRESET)
        tasas = {familia: (float(par[0]), float(par[1])) for familia, par in datos.get('tasas', {}).items()}
        conocidos = set(cls.__dataclass_fields__) - {'tasas'}
        extra = set(seccion) - conocidos
        if extra:
            cls._fallar(f"Campos de entrenamiento desconocidos: {sorted(extra)}.")
        return cls.desde_preset(preset, tasas=tasas, **seccion)

    @classmethod
    def desde_toml(cls, ruta: str) -> 'ConfiguracionEntrenamiento':
        try:
            with open(ruta, 'rb') as fichero:
                datos = tomllib.load(fichero)
        except (OSError, tomllib.TOMLDecodeError) as e:
            logger.error(f"No se pudo leer la configuración de entrenamiento '{ruta}': {e}")
            raise ErrorConfiguracion(f"Fichero de entrenamiento ilegible: {ruta}") from e
        config = cls.desde_diccionario(datos)
        logger.info(f"Configuración de entrenamiento cargada desde '{ruta}': {config.iteraciones} iteraciones.")
        return config

    def a_diccionario(self) -> Dict[str, Any]:
        datos = asdict(self)
        datos['tasas'] = {f: list(par) for f, par in self.tasas.items()}
        return datos
