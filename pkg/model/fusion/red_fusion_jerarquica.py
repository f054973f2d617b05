"""
Red de Fusión Residual Jerárquica (HRFN): codificación posicional y un MLP de
cuatro etapas con inyección residual de f_r y f_v que produce k colores por ancla.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorConfiguracion, ErrorEntradaInvalida
from model.fusion.capas import CapaLineal, relu, relu_backward, sigmoide, sigmoide_backward

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

NUM_ETAPAS = 4


# ============================================================
# Codificación posicional
# ============================================================

def codificacion_posicional(x: np.ndarray, frecuencias: int) -> np.ndarray:
    """
    γ(x) por lotes. Para x (n,3) devuelve (n, 6·L) con el término de índice
    6·l + 3·t + d igual a sin(2^l π x_d) si t = 0 y cos(2^l π x_d) si t = 1.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if frecuencias == 0:
        return np.zeros((x.shape[0], 0))
    escalas = (2.0 ** np.arange(frecuencias)) * np.pi
    argumentos = escalas[None, :, None] * x[:, None, :]
    codigo = np.stack([np.sin(argumentos), np.cos(argumentos)], axis=2)
    return codigo.reshape(x.shape[0], 6 * frecuencias)


def positional_encoding(x: np.ndarray, L_pe: int) -> np.ndarray:
    return codificacion_posicional(np.asarray(x, dtype=np.float64).reshape(1, 3), L_pe)[0]


# ============================================================
# Parámetros
# ============================================================

@dataclass
class ParametrosHRFN:
    """
    Pesos de las cuatro etapas M^H_1..M^H_4 y las ganancias residuales ω_r, ω_v.

    Cada etapa es una lista de capas lineales. La última capa de M^H_4 produce 3·k
    salidas y va seguida de una sigmoide; todas las demás, de ReLU.
    """
    etapas: List[List[CapaLineal]]
    omega_r: float = 1.0
    omega_v: float = 1.0
    frecuencias_pe: int = 4

    @classmethod
    def inicializar(cls, config: ConfiguracionEscena, rng: np.random.Generator) -> 'ParametrosHRFN':
        """Inicialización uniforme tipo He con semilla, sesgos nulos y ω_r = ω_v = 1."""
        entradas = cls.dimensiones_entrada(config)
        etapas: List[List[CapaLineal]] = []
        for indice, anchos in enumerate(config.anchos_hrfn):
            anchos = list(anchos)
            if indice == NUM_ETAPAS - 1:
                anchos.append(3 * config.k)
            capas = []
            actual = entradas[indice]
            for ancho in anchos:
                capas.append(CapaLineal.inicializar(actual, ancho, rng))
                actual = ancho
            etapas.append(capas)
        parametros = cls(etapas=etapas, frecuencias_pe=config.frecuencias_pe)
        logger.debug(f"HRFN inicializada con entradas por etapa {entradas}.")
        return parametros

    @staticmethod
    def dimensiones_entrada(config: ConfiguracionEscena) -> List[int]:
        anchos = config.anchos_hrfn
        return [
            config.dimension_pe + config.n_v + config.n_r + config.n_g,
            anchos[0][-1] + config.n_r,
            anchos[1][-1] + config.n_v,
            anchos[2][-1] + 3,
        ]

    def validar(self, config: ConfiguracionEscena):
        """
        Comprueba que las formas encadenan desde la entrada hasta 3·k salidas.

        Raises:
            ErrorConfiguracion: Si alguna dimensión no cuadra.
        """
        if len(self.etapas) != NUM_ETAPAS or any(len(e) == 0 for e in self.etapas):
            raise ErrorConfiguracion("La HRFN debe tener 4 etapas no vacías.")
        if self.frecuencias_pe != config.frecuencias_pe:
            raise ErrorConfiguracion(f"L_pe de la red ({self.frecuencias_pe}) != configuración ({config.frecuencias_pe}).")
        entradas = self.dimensiones_entrada_desde_pesos()
        esperadas = self.dimensiones_entrada(config)
        if entradas != esperadas:
            logger.error(f"Entradas de etapa {entradas} != esperadas {esperadas}.")
            raise ErrorConfiguracion("Las dimensiones de la HRFN no coinciden con la configuración.")
        for etapa in self.etapas:
            for anterior, siguiente in zip(etapa[:-1], etapa[1:]):
                if anterior.salida != siguiente.entrada:
                    raise ErrorConfiguracion("Capas consecutivas con dimensiones incompatibles.")
        if self.etapas[-1][-1].salida != 3 * config.k:
            raise ErrorConfiguracion(f"La salida de la HRFN debe ser 3·k = {3 * config.k}.")
        if not (np.isfinite(self.omega_r) and np.isfinite(self.omega_v)):
            raise ErrorConfiguracion("ω_r y ω_v deben ser finitos.")

    def dimensiones_entrada_desde_pesos(self) -> List[int]:
        return [etapa[0].entrada for etapa in self.etapas]

    @property
    def k(self) -> int:
        return self.etapas[-1][-1].salida // 3

    def copiar(self) -> 'ParametrosHRFN':
        return ParametrosHRFN([[c.copiar() for c in etapa] for etapa in self.etapas],
                              self.omega_r, self.omega_v, self.frecuencias_pe)

    # --- Tabla de tensores con nombre ---

    def a_diccionario(self) -> Dict[str, np.ndarray]:
        tensores: Dict[str, np.ndarray] = {}
        for e, etapa in enumerate(self.etapas):
            for c, capa in enumerate(etapa):
                tensores[f'hrfn.{e}.{c}.W'] = capa.pesos
                tensores[f'hrfn.{e}.{c}.b'] = capa.sesgo
        tensores['hrfn.omega_r'] = np.array([self.omega_r])
        tensores['hrfn.omega_v'] = np.array([self.omega_v])
        return tensores

    @classmethod
    def desde_diccionario(cls, tensores: Dict[str, np.ndarray], frecuencias_pe: int) -> 'ParametrosHRFN':
        etapas: List[List[CapaLineal]] = []
        for e in range(NUM_ETAPAS):
            capas = []
            c = 0
            while f'hrfn.{e}.{c}.W' in tensores:
                capas.append(CapaLineal(np.asarray(tensores[f'hrfn.{e}.{c}.W'], dtype=np.float64),
                                        np.asarray(tensores[f'hrfn.{e}.{c}.b'], dtype=np.float64)))
                c += 1
            etapas.append(capas)
        return cls(etapas, float(np.asarray(tensores['hrfn.omega_r']).reshape(-1)[0]),
                   float(np.asarray(tensores['hrfn.omega_v']).reshape(-1)[0]), frecuencias_pe)


# ============================================================
# Red
# ============================================================

@dataclass
class CintaHRFN:
    """Valores intermedios que el backward necesita."""
    registros: List[List[Tuple[np.ndarray, np.ndarray]]]
    f_v: np.ndarray
    f_r: np.ndarray
    salida: np.ndarray
    dims: Dict[str, int] = field(default_factory=dict)


@dataclass
class GradientesHRFN:
    f_v: np.ndarray
    f_r: np.ndarray
    f_g: np.ndarray
    capas: List[List[Tuple[np.ndarray, np.ndarray]]]
    omega_r: float
    omega_v: float

    def a_diccionario(self) -> Dict[str, np.ndarray]:
        """Gradientes con los mismos nombres que ParametrosHRFN.a_diccionario."""
        tensores: Dict[str, np.ndarray] = {}
        for e, etapa in enumerate(self.capas):
            for c, (dW, db) in enumerate(etapa):
                tensores[f'hrfn.{e}.{c}.W'] = dW
                tensores[f'hrfn.{e}.{c}.b'] = db
        tensores['hrfn.omega_r'] = np.array([self.omega_r])
        tensores['hrfn.omega_v'] = np.array([self.omega_v])
        return tensores


class RedFusionJerarquica:
    """
    Forward y backward por lotes de la HRFN:

        Emb = M1(γ ⊕ f_v ⊕ f_r ⊕ f_g) ⊕ ω_r·f_r
        ĉ   = σ(M4(M3(M2(Emb) ⊕ ω_v·f_v) ⊕ d_ic))
    """

    def __init__(self, parametros: ParametrosHRFN):
        self.parametros = parametros

    @staticmethod
    def _etapa(capas: List[CapaLineal], x: np.ndarray, sin_relu_final: bool = False):
        registros = []
        for indice, capa in enumerate(capas):
            z, cache = capa.forward(x)
            registros.append((cache, z))
            ultima = indice == len(capas) - 1
            x = z if (ultima and sin_relu_final) else relu(z)
        return x, registros

    @staticmethod
    def _etapa_backward(capas: List[CapaLineal], registros, dx: np.ndarray, sin_relu_final: bool = False):
        gradientes: List[Tuple[np.ndarray, np.ndarray]] = [None] * len(capas)  # type: ignore[list-item]
        for indice in range(len(capas) - 1, -1, -1):
            cache, z = registros[indice]
            ultima = indice == len(capas) - 1
            dz = dx if (ultima and sin_relu_final) else relu_backward(z, dx)
            dx, dW, db = capas[indice].backward(cache, dz)
            gradientes[indice] = (dW, db)
        return dx, gradientes

    def forward(self, gamma: np.ndarray, f_v: np.ndarray, f_r: np.ndarray, f_g: np.ndarray,
                d_ic: np.ndarray) -> Tuple[np.ndarray, CintaHRFN]:
        """
        Args:
            gamma: (A, 6·L_pe) codificación posicional de los centros.
            f_v: (A, n_v). f_r: (A, n_r). f_g: (n_g,) o (A, n_g). d_ic: (A, 3).

        Returns:
            (colores (A, k, 3) en (0,1), cinta para el backward).
        """
        p = self.parametros
        A = f_v.shape[0]
        f_g = np.broadcast_to(f_g, (A, f_g.shape[-1]))
        entrada = np.concatenate([gamma, f_v, f_r, f_g], axis=1)
        if entrada.shape[1] != p.etapas[0][0].entrada:
            logger.error(f"Entrada de dimensión {entrada.shape[1]} para una HRFN de {p.etapas[0][0].entrada}.")
            raise ErrorConfiguracion("Dimensiones de entrada incompatibles con la HRFN.")
        h1, r1 = self._etapa(p.etapas[0], entrada)
        emb = np.concatenate([h1, p.omega_r * f_r], axis=1)
        h2, r2 = self._etapa(p.etapas[1], emb)
        h3, r3 = self._etapa(p.etapas[2], np.concatenate([h2, p.omega_v * f_v], axis=1))
        z4, r4 = self._etapa(p.etapas[3], np.concatenate([h3, d_ic], axis=1), sin_relu_final=True)
        salida = sigmoide(z4)
        dims = {'gamma': gamma.shape[1], 'n_v': f_v.shape[1], 'n_r': f_r.shape[1], 'n_g': f_g.shape[1],
                'h1': h1.shape[1], 'h2': h2.shape[1], 'h3': h3.shape[1]}
        cinta = CintaHRFN([r1, r2, r3, r4], f_v, f_r, salida, dims)
        return salida.reshape(A, -1, 3), cinta

    def backward(self, cinta: CintaHRFN, d_colores: np.ndarray) -> GradientesHRFN:
        p = self.parametros
        d = cinta.dims
        A = cinta.salida.shape[0]
        dz4 = sigmoide_backward(cinta.salida, d_colores.reshape(A, -1))
        d_in4, g4 = self._etapa_backward(p.etapas[3], cinta.registros[3], dz4, sin_relu_final=True)
        d_in3, g3 = self._etapa_backward(p.etapas[2], cinta.registros[2], d_in4[:, :d['h3']])
        d_fv_residual = d_in3[:, d['h2']:]
        d_emb, g2 = self._etapa_backward(p.etapas[1], cinta.registros[1], d_in3[:, :d['h2']])
        d_fr_residual = d_emb[:, d['h1']:]
        d_in1, g1 = self._etapa_backward(p.etapas[0], cinta.registros[0], d_emb[:, :d['h1']])

        inicio_fv = d['gamma']
        inicio_fr = inicio_fv + d['n_v']
        inicio_fg = inicio_fr + d['n_r']
        d_fv = d_in1[:, inicio_fv:inicio_fr] + p.omega_v * d_fv_residual
        d_fr = d_in1[:, inicio_fr:inicio_fg] + p.omega_r * d_fr_residual
        d_fg = d_in1[:, inicio_fg:]
        return GradientesHRFN(
            f_v=d_fv, f_r=d_fr, f_g=d_fg, capas=[g1, g2, g3, g4],
            omega_r=float(np.sum(d_fr_residual * cinta.f_r)),
            omega_v=float(np.sum(d_fv_residual * cinta.f_v)),
        )

    @staticmethod
    def firma(cinta: CintaHRFN) -> List[np.ndarray]:
        """Máscaras ReLU del forward; cambian solo al cruzar un punto no diferenciable."""
        mascaras = []
        for e, registros in enumerate(cinta.registros):
            for c, (_, z) in enumerate(registros):
                if e == NUM_ETAPAS - 1 and c == len(registros) - 1:
                    continue
                mascaras.append(z > 0)
        return mascaras


def hrfn_forward(x_i: np.ndarray, f_v: np.ndarray, f_r: np.ndarray, f_g: np.ndarray,
                 d_ic: np.ndarray, params: ParametrosHRFN,
                 config: Optional[ConfiguracionEscena] = None) -> np.ndarray:
    """
    Colores (k, 3) de un ancla.

    Raises:
        ErrorEntradaInvalida: Si d_ic no es unitario.
        ErrorConfiguracion: Si alguna dimensión no coincide.
    """
    d_ic = np.asarray(d_ic, dtype=np.float64).reshape(1, 3)
    if abs(np.linalg.norm(d_ic) - 1.0) > 1e-6:
        logger.error(f"d_ic no unitario: {d_ic}")
        raise ErrorEntradaInvalida("La dirección d_ic debe ser unitaria.")
    if config is not None:
        params.validar(config)
    gamma = codificacion_posicional(np.asarray(x_i).reshape(1, 3), params.frecuencias_pe)
    colores, _ = RedFusionJerarquica(params).forward(
        gamma, np.asarray(f_v, dtype=np.float64).reshape(1, -1), np.asarray(f_r, dtype=np.float64).reshape(1, -1),
        np.asarray(f_g, dtype=np.float64).reshape(-1), d_ic)
    return colores[0]
