import pytest
import logging
import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorConfiguracion, ErrorEntradaInvalida
from model.fusion.capas import CapaLineal, relu_backward, sigmoide
from model.fusion.red_fusion_jerarquica import (ParametrosHRFN, RedFusionJerarquica, codificacion_posicional,
                                                hrfn_forward, positional_encoding)

logging.disable(logging.CRITICAL)


# ============================================================
# Fixtures de Pytest
# ============================================================

@pytest.fixture
def config_toy():
    return ConfiguracionEscena.desde_preset('toy')


@pytest.fixture
def parametros(config_toy):
    return ParametrosHRFN.inicializar(config_toy, np.random.default_rng(0))


@pytest.fixture
def entradas(config_toy):
    rng = np.random.default_rng(8)
    A = 5
    x = rng.uniform(-1, 1, (A, 3))
    d = rng.standard_normal((A, 3))
    return {
        'gamma': codificacion_posicional(x, config_toy.frecuencias_pe),
        'f_v': rng.standard_normal((A, config_toy.n_v)),
        'f_r': rng.standard_normal((A, config_toy.n_r)),
        'f_g': rng.standard_normal(config_toy.n_g),
        'd_ic': d / np.linalg.norm(d, axis=1, keepdims=True),
    }


# ============================================================
# Codificación posicional
# ============================================================

def test_orden_de_la_codificacion():
    """El término 6l + 3t + d es sin (t=0) o cos (t=1) de 2^l π x_d."""
    x = np.array([0.25, 0.5, -0.1])
    codigo = positional_encoding(x, 2)
    assert codigo.shape == (12,)
    for l in range(2):
        for d in range(3):
            assert codigo[6 * l + d] == pytest.approx(np.sin(2 ** l * np.pi * x[d]))
            assert codigo[6 * l + 3 + d] == pytest.approx(np.cos(2 ** l * np.pi * x[d]))


def test_codificacion_del_origen():
    codigo = positional_encoding(np.zeros(3), 3)
    assert np.allclose(codigo.reshape(3, 2, 3)[:, 0], 0.0)
    assert np.allclose(codigo.reshape(3, 2, 3)[:, 1], 1.0)


def test_codificacion_sin_frecuencias():
    assert codificacion_posicional(np.zeros((4, 3)), 0).shape == (4, 0)


# ============================================================
# Capas
# ============================================================

def test_inicializacion_he():
    capa = CapaLineal.inicializar(24, 10, np.random.default_rng(1))
    assert capa.pesos.shape == (24, 10)
    assert np.all(np.abs(capa.pesos) <= np.sqrt(6.0 / 24))
    assert np.all(capa.sesgo == 0.0)


def test_sigmoide_estable():
    valores = sigmoide(np.array([-1000.0, 0.0, 1000.0]))
    assert np.allclose(valores, [0.0, 0.5, 1.0])
    assert np.all(np.isfinite(valores))


def test_relu_backward_en_cero():
    assert np.all(relu_backward(np.array([-1.0, 0.0, 2.0]), np.ones(3)) == [0.0, 0.0, 1.0])


# ============================================================
# Forward
# ============================================================

def test_dimensiones_de_entrada(config_toy):
    """Etapa 1: γ ⊕ f_v ⊕ f_r ⊕ f_g; después h ⊕ f_r, h ⊕ f_v y h ⊕ d_ic."""
    assert ParametrosHRFN.dimensiones_entrada(config_toy) == [12 + 4 + 8 + 3, 6 + 8, 5 + 4, 5 + 3]


def test_colores_en_rango(parametros, config_toy):
    colores = hrfn_forward(np.array([0.1, 0.2, 0.3]), np.zeros(config_toy.n_v), np.ones(config_toy.n_r),
                           np.zeros(config_toy.n_g), np.array([0.0, 0.0, 1.0]), parametros, config_toy)
    assert colores.shape == (config_toy.k, 3)
    assert np.all((colores > 0.0) & (colores < 1.0))


def test_pesos_nulos_dan_gris(parametros, config_toy):
    for etapa in parametros.etapas:
        for capa in etapa:
            capa.pesos[:] = 0.0
    colores = hrfn_forward(np.zeros(3), np.ones(config_toy.n_v), np.ones(config_toy.n_r),
                           np.ones(config_toy.n_g), np.array([1.0, 0.0, 0.0]), parametros)
    assert np.allclose(colores, 0.5)


def test_direccion_no_unitaria(parametros, config_toy):
    with pytest.raises(ErrorEntradaInvalida):
        hrfn_forward(np.zeros(3), np.zeros(config_toy.n_v), np.zeros(config_toy.n_r), np.zeros(config_toy.n_g),
                     np.array([0.0, 0.0, 2.0]), parametros)


def test_red_incompatible_con_la_configuracion(parametros, config_toy):
    with pytest.raises(ErrorConfiguracion):
        parametros.validar(config_toy.con_cambios(n_v=6))


def test_entrada_de_dimension_incorrecta(parametros, entradas):
    with pytest.raises(ErrorConfiguracion):
        RedFusionJerarquica(parametros).forward(entradas['gamma'][:, :6], entradas['f_v'], entradas['f_r'],
                                                entradas['f_g'], entradas['d_ic'])


def test_diccionario_de_tensores(parametros, config_toy):
    copia = ParametrosHRFN.desde_diccionario(parametros.a_diccionario(), config_toy.frecuencias_pe)
    copia.validar(config_toy)
    assert all(np.array_equal(a.pesos, b.pesos) for e1, e2 in zip(parametros.etapas, copia.etapas)
               for a, b in zip(e1, e2))


# ============================================================
# Backward
# ============================================================

def test_backward_por_diferencias_finitas(parametros, entradas):
    """Gradientes de L = Σ w·ĉ respecto a entradas, pesos y ganancias residuales."""
    red = RedFusionJerarquica(parametros)
    colores, cinta = red.forward(**entradas)
    pesos = np.random.default_rng(3).standard_normal(colores.shape)
    grad = red.backward(cinta, pesos)
    h = 1e-6

    def perdida():
        return float(np.sum(pesos * red.forward(**entradas)[0]))

    def central(tensor, indice):
        original = tensor[indice]
        tensor[indice] = original + h
        mas = perdida()
        tensor[indice] = original - h
        menos = perdida()
        tensor[indice] = original
        return (mas - menos) / (2 * h)

    for indice in [(0, 0), (3, 2)]:
        assert grad.f_v[indice] == pytest.approx(central(entradas['f_v'], indice), rel=1e-5, abs=1e-8)
        assert grad.f_r[indice] == pytest.approx(central(entradas['f_r'], indice), rel=1e-5, abs=1e-8)
    assert grad.f_g.sum(axis=0)[1] == pytest.approx(central(entradas['f_g'], 1), rel=1e-5, abs=1e-8)
    primera = parametros.etapas[0][0]
    assert grad.capas[0][0][0][2, 1] == pytest.approx(central(primera.pesos, (2, 1)), rel=1e-5, abs=1e-8)
    assert grad.capas[0][0][1][3] == pytest.approx(central(primera.sesgo, 3), rel=1e-5, abs=1e-8)
    ultima = parametros.etapas[3][-1]
    assert grad.capas[3][-1][0][0, 4] == pytest.approx(central(ultima.pesos, (0, 4)), rel=1e-5, abs=1e-8)

    for nombre in ('omega_r', 'omega_v'):
        original = getattr(parametros, nombre)
        setattr(parametros, nombre, original + h)
        mas = perdida()
        setattr(parametros, nombre, original - h)
        menos = perdida()
        setattr(parametros, nombre, original)
        assert getattr(grad, nombre) == pytest.approx((mas - menos) / (2 * h), rel=1e-5, abs=1e-8)


def test_firma_excluye_la_capa_sigmoide(parametros, entradas):
    _, cinta = RedFusionJerarquica(parametros).forward(**entradas)
    numero_capas = sum(len(e) for e in parametros.etapas)
    assert len(RedFusionJerarquica.firma(cinta)) == numero_capas - 1
