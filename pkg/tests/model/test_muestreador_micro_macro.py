import pytest
import logging
import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorConfiguracion, ErrorGeometriaDegenerada
from model.escena.ancla import Ancla
from model.escena.vista_camara import VistaCamara
from model.muestreo.muestreador_micro_macro import (MuestreadorMicroMacro, broad_projection, muestrear_bilineal,
                                                    narrow_projection, radio_amplio, refined_feature)
from model.wavelet.piramide_caracteristicas import split_feature_map

logging.disable(logging.CRITICAL)


# ============================================================
# Fixtures de Pytest
# ============================================================

@pytest.fixture
def config_toy():
    return ConfiguracionEscena.desde_preset('toy')


@pytest.fixture
def vista_100():
    """f=100, punto principal (50,50), imagen 100×100 y mapa a resolución completa."""
    vista = VistaCamara(id=0, rotacion=np.eye(3), traslacion=np.zeros(3), fx=100.0, fy=100.0,
                        cx=50.0, cy=50.0, ancho=100, alto=100)
    vista.mapa = np.zeros((8, 100, 100))
    return vista


@pytest.fixture
def vista_anillo(config_toy):
    vista = VistaCamara.mirando_a(1, np.array([0.0, -4.0, 1.0]), np.zeros(3), focal=19.0, ancho=16, alto=16)
    vista.inicializar_apariencia(config_toy, np.random.default_rng(0))
    return vista


def lote_anclas(config, rng, A):
    centros = rng.uniform(-0.5, 0.5, (A, 3))
    nc = rng.uniform(-1.0, 1.0, (A, config.k_s, 2))
    bc = rng.uniform(0.9, 1.1, (A, config.k_s, 2))
    omega_n = [rng.uniform(0.0, 0.5, (A, 4 ** m)) for m in range(1, config.M + 1)]
    omega_b = [rng.uniform(0.0, 0.5, (A, 4 ** m)) for m in range(1, config.M + 1)]
    return centros, nc, bc, omega_n, omega_b


# ============================================================
# Proyecciones
# ============================================================

def test_estrecho_sin_desplazamiento(vista_100):
    muestras = narrow_projection(np.array([-0.2, -0.4, 2.0]), vista_100, np.zeros((2, 2)), 2.0)
    assert len(muestras) == 2
    assert all(np.allclose(m.uv, (40.0, 30.0)) for m in muestras)
    assert muestras[0].tipo == 'estrecho'


def test_estrecho_desplazamiento_radio(vista_100):
    muestras = narrow_projection(np.array([-0.2, -0.4, 2.0]), vista_100, np.array([[2.0, 0.0]]), 2.0)
    assert np.allclose(muestras[0].uv, (42.0, 30.0))
    assert np.allclose(muestras[0].centro, (40.0, 30.0))


def test_estrecho_detras_de_la_camara(vista_100):
    assert narrow_projection(np.array([0.0, 0.0, -1.0]), vista_100, np.zeros((1, 2)), 2.0) is None


def test_radio_amplio_formula():
    vista = VistaCamara(id=0, rotacion=np.eye(3), traslacion=np.zeros(3), fx=1.0, fy=1.0, cx=0.0, cy=0.0,
                        ancho=4, alto=4)
    assert radio_amplio(np.array([0.0, 0.0, 2.0]), vista, 2.0) == pytest.approx(1.0)


def test_amplio_identidad(vista_100):
    muestras = broad_projection(np.array([-0.2, -0.4, 2.0]), vista_100, np.ones((1, 2)), 2.0)
    assert np.allclose(muestras[0].uv, (40.0, 30.0))


def test_amplio_escalado(vista_100):
    x = np.array([-0.2, -0.4, 2.0])
    muestras = broad_projection(x, vista_100, np.array([[1.1, 1.0]]), 2.0)
    assert np.allclose(muestras[0].uv, (44.0, 30.0))
    assert muestras[0].radio == pytest.approx(2.0 / np.linalg.norm(x))


def test_amplio_punto_en_el_centro(vista_100):
    with pytest.raises(ErrorGeometriaDegenerada):
        broad_projection(np.zeros(3), vista_100, np.ones((1, 2)), 2.0)


# ============================================================
# Muestreo bilineal
# ============================================================

def test_bilineal_cuatro_texeles():
    mapa = np.arange(16, dtype=np.float64).reshape(1, 4, 4)
    valores, _ = muestrear_bilineal(mapa, np.array([[0.5, 0.5]]))
    assert valores[0, 0] == pytest.approx(0.25 * (0.0 + 1.0 + 4.0 + 5.0))


def test_bilineal_exacto_en_planos():
    yy, xx = np.mgrid[0:6, 0:7]
    mapa = (2.0 * xx - 3.0 * yy + 0.5)[None].astype(np.float64)
    uv = np.random.default_rng(1).uniform(0.0, 5.0, (20, 2))
    valores, _ = muestrear_bilineal(mapa, uv)
    assert np.allclose(valores[:, 0], 2.0 * uv[:, 0] - 3.0 * uv[:, 1] + 0.5, atol=1e-9)


def test_bilineal_pinzado_al_borde():
    mapa = np.arange(16, dtype=np.float64).reshape(1, 4, 4)
    valores, registro = muestrear_bilineal(mapa, np.array([[-3.0, 1.0], [10.0, 10.0]]))
    assert valores[0, 0] == pytest.approx(4.0)
    assert valores[1, 0] == pytest.approx(15.0)
    assert registro.pinzado_u.tolist() == [True, True]
    assert registro.pinzado_v.tolist() == [False, True]


# ============================================================
# refined_feature
# ============================================================

def test_mapas_constantes_m0(vista_anillo):
    """Con M=0 y mapas constantes f_r vale c en cada canal."""
    config = ConfiguracionEscena(M=0, k_s=2, n_r=8)
    ancla = Ancla.crear(np.array([0.1, 0.2, 0.0]), config)
    ancla.nc = np.array([[1.0, -1.0], [0.5, 0.5]])
    ancla.bc = np.array([[1.05, 0.95], [1.0, 1.0]])
    c = np.array([0.3, -0.2, 0.7, 1.1, 0.3, -0.2, 0.7, 1.1])
    mapa = np.broadcast_to(c[:, None, None], (8, 8, 8)).copy()
    f_r = refined_feature(ancla, split_feature_map(mapa, 0), vista_anillo, config)
    assert f_r.shape == (8,)
    assert np.allclose(f_r, c)


def test_mapas_constantes_m1_banda_ll(vista_anillo, config_toy):
    """Nivel 0 da c; en el nivel 1 solo la banda LL (2c) contribuye, con su peso ω."""
    ancla = Ancla.crear(np.array([0.1, 0.2, 0.0]), config_toy)
    mapa = np.full((8, 8, 8), 0.4)
    f_r = refined_feature(ancla, split_feature_map(mapa, 1), vista_anillo, config_toy)
    assert np.allclose(f_r[:4], 0.4)
    assert np.allclose(f_r[4:], 0.25 * 2.0 * 0.4)


@pytest.mark.parametrize('M, n_r', [(0, 6), (1, 8), (1, 32), (2, 12)])
def test_longitud_de_salida(M, n_r):
    config = ConfiguracionEscena(M=M, n_r=n_r, k_s=1)
    vista = VistaCamara.mirando_a(0, np.array([0.0, -4.0, 1.0]), np.zeros(3), focal=19.0, ancho=16, alto=16)
    vista.mapa = np.random.default_rng(M).standard_normal((n_r, 8, 8))
    ancla = Ancla.crear(np.zeros(3), config)
    assert refined_feature(ancla, split_feature_map(vista.mapa, M), vista, config).shape == (n_r,)


def test_estrecho_y_amplio_iguales_en_mapas_identicos(vista_anillo, config_toy):
    base = np.random.default_rng(3).standard_normal((2, 8, 8))
    mapa = np.concatenate([base, base, np.zeros((4, 8, 8))])
    ancla = Ancla.crear(np.array([0.2, -0.1, 0.1]), config_toy)
    f_r = refined_feature(ancla, split_feature_map(mapa, 1), vista_anillo, config_toy)
    assert np.allclose(f_r[0:2], f_r[2:4])


def test_piramide_incompatible(vista_anillo, config_toy):
    ancla = Ancla.crear(np.zeros(3), config_toy)
    with pytest.raises(ErrorConfiguracion):
        refined_feature(ancla, split_feature_map(np.zeros((8, 8, 8)), 0), vista_anillo, config_toy)


def test_ancla_detras_de_la_camara_da_cero(vista_anillo, config_toy):
    ancla = Ancla.crear(np.array([0.0, -8.0, 1.0]), config_toy)
    f_r = refined_feature(ancla, split_feature_map(np.ones((8, 8, 8)), 1), vista_anillo, config_toy)
    assert np.all(f_r == 0.0)


def test_muestras_frustum(vista_anillo, config_toy):
    """Σ_m 2·k_s·4^m muestras por ancla."""
    muestras = MuestreadorMicroMacro(config_toy).muestras_frustum(Ancla.crear(np.zeros(3), config_toy), vista_anillo)
    assert len(muestras) == 2 * config_toy.k_s * (1 + 4)
    assert {m.tipo for m in muestras} == {'estrecho', 'amplio'}


# ============================================================
# Backward por lotes
# ============================================================

def test_backward_por_diferencias_finitas(vista_anillo, config_toy):
    """Gradientes de L = Σ w·f_r respecto a nc, bc, ω y F^MAP."""
    rng = np.random.default_rng(17)
    muestreador = MuestreadorMicroMacro(config_toy)
    centros, nc, bc, omega_n, omega_b = lote_anclas(config_toy, rng, 3)
    mapa = vista_anillo.mapa + rng.standard_normal(vista_anillo.mapa.shape)
    pesos = rng.standard_normal((3, config_toy.n_r))

    def perdida(nc_, bc_, on_, ob_, mapa_):
        f_r, _ = muestreador.forward(centros, nc_, bc_, on_, ob_, vista_anillo, split_feature_map(mapa_, 1))
        return float(np.sum(pesos * f_r))

    _, estado = muestreador.forward(centros, nc, bc, omega_n, omega_b, vista_anillo, split_feature_map(mapa, 1))
    grad = muestreador.backward(estado, pesos, config_toy.k_s)
    h = 1e-6

    def central(tensor, indice, evaluar):
        original = tensor[indice]
        tensor[indice] = original + h
        mas = evaluar()
        tensor[indice] = original - h
        menos = evaluar()
        tensor[indice] = original
        return (mas - menos) / (2 * h)

    def evaluar():
        return perdida(nc, bc, omega_n, omega_b, mapa)

    for indice in [(0, 0, 0), (1, 1, 1), (2, 0, 1)]:
        assert grad.nc[indice] == pytest.approx(central(nc, indice, evaluar), rel=1e-4, abs=1e-6)
        assert grad.bc[indice] == pytest.approx(central(bc, indice, evaluar), rel=1e-4, abs=1e-6)
    for indice in [(0, 0), (2, 3)]:
        assert grad.omega_n[0][indice] == pytest.approx(central(omega_n[0], indice, evaluar), rel=1e-4, abs=1e-6)
        assert grad.omega_b[0][indice] == pytest.approx(central(omega_b[0], indice, evaluar), rel=1e-4, abs=1e-6)
    for indice in [(0, 3, 4), (5, 2, 2), (7, 4, 5)]:
        assert grad.mapa[indice] == pytest.approx(central(mapa, indice, evaluar), rel=1e-4, abs=1e-6)
