"""
Vista entrenable de una escena: los tensores optimizables como arrays planos con
nombre, el forward completo muestreo → fusión → render → pérdida y su backward
de extremo a extremo.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from model.errores import ErrorEntradaInvalida
from model.escena.paquete_escena import PaqueteEscena
from model.fusion.red_fusion_jerarquica import ParametrosHRFN, RedFusionJerarquica, codificacion_posicional
from model.muestreo.muestreador_micro_macro import MuestreadorMicroMacro
from model.perdidas.funciones_perdida import (
    DesglosePerdida,
    gradiente_fotometrico,
    perdida_proyeccion_lote,
    total_loss,
    volume_loss,
)
from model.render.rasterizador import backward_color_opacity, firma_render, render
from model.render.splat2d import Splat2D, proyectar_nube
from model.wavelet.piramide_caracteristicas import split_feature_map

# Configuración del logger para este módulo
logger = logging.getLogger(__name__)

# Tensores intermedios que pueden sustituirse en el forward
SUSTITUIBLES = ('colores', 'f_r')
# Atributos por Gaussiana que nunca se optimizan
CONGELADOS = ('offsets', 'escalas', 'rotaciones')


@dataclass
class ResultadoEvaluacion:
    """
    Resultado de un forward/backward en una vista.

    `gradientes` contiene dL/dθ para cada tensor entrenable que interviene en la
    vista (las apariencias de otras vistas no aparecen) y para los intermedios
    'colores' (N,3) y 'f_r' (A,n_r). `firma` reúne las decisiones discretas del
    forward (máscaras ReLU, celdas bilineales, máscaras del compositor, bisagras
    y signos L1).
    """
    desglose: DesglosePerdida
    imagen: np.ndarray
    colores: np.ndarray
    f_r: np.ndarray
    gradientes: Dict[str, np.ndarray]
    firma: List[np.ndarray]


class ModeloEntrenable:
    """
    Envuelve un PaqueteEscena. Posiciones, escalas y rotaciones de las Gaussianas
    están congeladas, así que la nube y sus splats por vista se calculan una vez.

    Nombres de los tensores: 'f_v' (A,n_v), 'nc'/'bc' (A,k_s,2), 'omega_n.{m}' y
    'omega_b.{m}' (A,4^m), 'opacidades' (A,k), 'hrfn.*' (pesos, ω_r, ω_v),
    'f_g.{id}' y 'mapa.{id}' por vista.
    """

    def __init__(self, escena: PaqueteEscena):
        if not escena.anclas:
            logger.error("La escena no tiene anclas que entrenar.")
            raise ErrorEntradaInvalida("La escena debe tener al menos un ancla.")
        self.escena = escena
        self.config = escena.config
        cfg = self.config
        anclas = escena.anclas
        self.centros = escena.centros_anclas()
        self.nube = escena.nube_gaussianas()
        self.gamma = codificacion_posicional(self.centros, cfg.frecuencias_pe)
        self.volumen = volume_loss(self.nube.escalas)

        p: Dict[str, np.ndarray] = {
            'f_v': np.stack([a.f_v for a in anclas]),
            'nc': np.stack([a.nc for a in anclas]),
            'bc': np.stack([a.bc for a in anclas]),
        }
        for m in range(1, cfg.M + 1):
            p[f'omega_n.{m}'] = np.stack([a.omega_n[m - 1] for a in anclas])
            p[f'omega_b.{m}'] = np.stack([a.omega_b[m - 1] for a in anclas])
        p['opacidades'] = np.stack([a.opacidades for a in anclas])
        tensores_hrfn = {n: np.array(t, dtype=np.float64) for n, t in escena.hrfn.a_diccionario().items()}
        p.update(tensores_hrfn)
        for vista in escena.vistas:
            p[f'f_g.{vista.id}'] = np.array(vista.f_g, dtype=np.float64)
            p[f'mapa.{vista.id}'] = np.array(vista.mapa, dtype=np.float64)
        self.parametros = p
        # Las capas comparten memoria con self.parametros: Adam las actualiza in situ
        self.hrfn = ParametrosHRFN.desde_diccionario(tensores_hrfn, cfg.frecuencias_pe)
        self.red = RedFusionJerarquica(self.hrfn)
        self.muestreador = MuestreadorMicroMacro(cfg)
        self._splats: Dict[int, List[Splat2D]] = {}
        self._direcciones: Dict[int, np.ndarray] = {}

    # --- Acceso ---

    @property
    def num_anclas(self) -> int:
        return self.centros.shape[0]

    def nombres_entrenables(self, id_vista: Optional[int] = None) -> List[str]:
        """Tensores entrenables; con una vista, solo los que intervienen en ella."""
        nombres = []
        for nombre in self.parametros:
            if nombre.startswith('f_g.') or nombre.startswith('mapa.'):
                if id_vista is not None and int(nombre.split('.')[1]) != id_vista:
                    continue
            nombres.append(nombre)
        return nombres

    def tensor_congelado(self, nombre: str) -> np.ndarray:
        """Atributos por Gaussiana fuera del conjunto optimizado, apilados por ancla."""
        if nombre == 'offsets':
            return np.stack([a.offsets for a in self.escena.anclas])
        if nombre == 'escalas':
            return np.stack([a.escalas for a in self.escena.anclas])
        if nombre == 'rotaciones':
            return np.stack([a.rotaciones for a in self.escena.anclas])
        raise ErrorEntradaInvalida(f"'{nombre}' no es un tensor congelado.")

    def splats(self, id_vista: int) -> List[Splat2D]:
        if id_vista not in self._splats:
            self._splats[id_vista] = proyectar_nube(self.nube, self.escena.vista(id_vista), self.config.plano_cercano)
        return self._splats[id_vista]

    def _direccion(self, id_vista: int) -> np.ndarray:
        if id_vista not in self._direcciones:
            self._direcciones[id_vista] = self.escena.vista(id_vista).direccion_desde_camara(self.centros)
        return self._direcciones[id_vista]

    def _sincronizar_hrfn(self):
        self.hrfn.omega_r = float(self.parametros['hrfn.omega_r'][0])
        self.hrfn.omega_v = float(self.parametros['hrfn.omega_v'][0])

    def _omegas(self, prefijo: str) -> List[np.ndarray]:
        return [self.parametros[f'{prefijo}.{m}'] for m in range(1, self.config.M + 1)]

    # --- Forward ---

    def colores(self, id_vista: int):
        """Forward de muestreo y fusión: (colores (N,3), f_r, estado del muestreo, cinta HRFN)."""
        self._sincronizar_hrfn()
        vista = self.escena.vista(id_vista)
        p = self.parametros
        piramide = split_feature_map(p[f'mapa.{id_vista}'], self.config.M)
        f_r, estado = self.muestreador.forward(self.centros, p['nc'], p['bc'], self._omegas('omega_n'),
                                               self._omegas('omega_b'), vista, piramide)
        colores, cinta = self.red.forward(self.gamma, p['f_v'], f_r, p[f'f_g.{id_vista}'], self._direccion(id_vista))
        return colores.reshape(-1, 3), f_r, estado, cinta

    def renderizar(self, id_vista: int, excluidos: Iterable[int] = ()) -> np.ndarray:
        """Imagen H×W×3 de la escena en una vista, sin las Gaussianas excluidas."""
        colores, _, _, _ = self.colores(id_vista)
        salida = render(self.nube, self.escena.vista(id_vista), colores, self.parametros['opacidades'].reshape(-1),
                        splats=self.splats(id_vista), excluidos=excluidos, plano_cercano=self.config.plano_cercano)
        return salida.imagen

    def evaluar(self, id_vista: int, sustituciones: Optional[Mapping[str, np.ndarray]] = None,
                calcular_gradientes: bool = True) -> ResultadoEvaluacion:
        """
        Forward completo en una vista con su pérdida total y, opcionalmente, el
        backward de extremo a extremo.

        Args:
            id_vista: Vista con imagen de referencia.
            sustituciones: Valores que reemplazan a 'colores' o 'f_r' en el forward;
                           los tensores aguas arriba del intermedio sustituido dejan de
                           influir en la pérdida fotométrica.
            calcular_gradientes: Si False, solo se evalúa la pérdida.

        Raises:
            ErrorEntradaInvalida: Si la vista no tiene imagen de referencia o la sustitución es desconocida.
        """
        sustituciones = dict(sustituciones or {})
        desconocidas = set(sustituciones) - set(SUSTITUIBLES)
        if desconocidas:
            raise ErrorEntradaInvalida(f"Sustituciones no admitidas: {sorted(desconocidas)}.")
        cfg = self.config
        vista = self.escena.vista(id_vista)
        if vista.imagen_gt is None:
            logger.error(f"La vista {id_vista} no tiene imagen de referencia.")
            raise ErrorEntradaInvalida(f"La vista {id_vista} no tiene imagen de referencia.")
        self._sincronizar_hrfn()
        p = self.parametros
        A, k_s = self.num_anclas, cfg.k_s

        # Muestreo y fusión
        piramide = split_feature_map(p[f'mapa.{id_vista}'], cfg.M)
        f_r_muestreado, estado = self.muestreador.forward(self.centros, p['nc'], p['bc'], self._omegas('omega_n'),
                                                          self._omegas('omega_b'), vista, piramide)
        f_r = np.asarray(sustituciones.get('f_r', f_r_muestreado), dtype=np.float64)
        colores_red, cinta = self.red.forward(self.gamma, p['f_v'], f_r, p[f'f_g.{id_vista}'],
                                              self._direccion(id_vista))
        colores = np.asarray(sustituciones.get('colores', colores_red.reshape(-1, 3)), dtype=np.float64)

        # Render y pérdidas
        salida = render(self.nube, vista, colores, p['opacidades'].reshape(-1), registrar=True,
                        splats=self.splats(id_vista), plano_cercano=cfg.plano_cercano)
        _, l_ssim, l_1, d_imagen = gradiente_fotometrico(salida.imagen, vista.imagen_gt, cfg.lambda_ssim, cfg.lambda_1)
        l_proj, d_nc_proj, d_bc_proj, firma_bisagras = perdida_proyeccion_lote(
            p['nc'], p['bc'], estado.p_hat, estado.radios_amplios, estado.visibles, cfg.radio_estrecho)
        desglose = total_loss(l_ssim, l_1, l_proj, self.volumen, cfg.lambda_ssim, cfg.lambda_1,
                              cfg.lambda_proj, cfg.lambda_vol)

        firma = (RedFusionJerarquica.firma(cinta) + MuestreadorMicroMacro.firma(estado) + firma_bisagras
                 + [np.sign(salida.imagen - vista.imagen_gt)] + firma_render(salida.estado))
        if not calcular_gradientes:
            return ResultadoEvaluacion(desglose, salida.imagen, colores, f_r, {}, firma)

        # Backward
        g: Dict[str, np.ndarray] = {nombre: np.zeros_like(p[nombre]) for nombre in self.nombres_entrenables(id_vista)}
        d_colores, d_opacidades = backward_color_opacity(salida.estado, d_imagen)
        g['colores'] = d_colores
        g['opacidades'] = d_opacidades.reshape(A, -1)
        g['f_r'] = np.zeros_like(f_r)
        if 'colores' not in sustituciones:
            g_red = self.red.backward(cinta, d_colores.reshape(A, -1, 3))
            g.update(g_red.a_diccionario())
            g['f_v'] = g_red.f_v
            g[f'f_g.{id_vista}'] = g_red.f_g.sum(axis=0)
            g['f_r'] = g_red.f_r
            if 'f_r' not in sustituciones:
                g_mu = self.muestreador.backward(estado, g_red.f_r, k_s)
                g['nc'] = g_mu.nc
                g['bc'] = g_mu.bc
                for m in range(1, cfg.M + 1):
                    g[f'omega_n.{m}'] = g_mu.omega_n[m - 1]
                    g[f'omega_b.{m}'] = g_mu.omega_b[m - 1]
                g[f'mapa.{id_vista}'] = g_mu.mapa
        g['nc'] = g['nc'] + cfg.lambda_proj * d_nc_proj
        g['bc'] = g['bc'] + cfg.lambda_proj * d_bc_proj
        return ResultadoEvaluacion(desglose, salida.imagen, colores, f_r, g, firma)

    # --- Escritura ---

    def recortar_opacidades(self):
        np.clip(self.parametros['opacidades'], 0.0, 1.0, out=self.parametros['opacidades'])

    def volcar(self, nombres: Optional[Sequence[str]] = None) -> Dict[str, np.ndarray]:
        """Copia de los tensores (todos o los indicados), p. ej. para un volcado de diagnóstico."""
        nombres = list(self.parametros) if nombres is None else nombres
        return {n: self.parametros[n].copy() for n in nombres}

    def a_escena(self) -> PaqueteEscena:
        """Escribe los tensores optimizados en la escena envuelta y la devuelve."""
        self._sincronizar_hrfn()
        p = self.parametros
        for i, ancla in enumerate(self.escena.anclas):
            ancla.f_v = p['f_v'][i].copy()
            ancla.nc = p['nc'][i].copy()
            ancla.bc = p['bc'][i].copy()
            ancla.omega_n = [p[f'omega_n.{m}'][i].copy() for m in range(1, self.config.M + 1)]
            ancla.omega_b = [p[f'omega_b.{m}'][i].copy() for m in range(1, self.config.M + 1)]
            ancla.opacidades = p['opacidades'][i].copy()
        self.escena.hrfn = self.hrfn.copiar()
        for vista in self.escena.vistas:
            vista.f_g = p[f'f_g.{vista.id}'].copy()
            vista.mapa = p[f'mapa.{vista.id}'].copy()
        return self.escena
