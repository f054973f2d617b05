import pytest
import logging
import numpy as np

from model.entrenamiento.configuracion_entrenamiento import ConfiguracionEntrenamiento
from model.entrenamiento.optimizador_adam import OptimizadorAdam
from model.errores import ErrorConfiguracion

logging.disable(logging.CRITICAL)


# ============================================================
# Fixtures de Pytest
# ============================================================

@pytest.fixture
def config():
    return ConfiguracionEntrenamiento(iteraciones=10, tasas={'f_v': (0.1, 0.01), 'opacidades': (0.2, 0.02)})


# ============================================================
# Tests
# ============================================================

def test_primer_paso_es_el_signo(config):
    """Tras la corrección de sesgo el primer paso vale lr·g/|g|."""
    parametros = {'f_v': np.zeros(3)}
    OptimizadorAdam(config).paso(parametros, {'f_v': np.array([1.0, -2.0, 0.0])}, 0)
    assert np.allclose(parametros['f_v'], [-0.1, 0.1, 0.0], atol=1e-7)


def test_mascara_de_filas(config):
    parametros = {'opacidades': np.ones(3)}
    optimizador = OptimizadorAdam(config)
    optimizador.paso(parametros, {'opacidades': np.ones(3)}, 0,
                     mascaras_filas={'opacidades': np.array([True, False, True])})
    assert parametros['opacidades'][1] == 1.0
    assert np.allclose(parametros['opacidades'][[0, 2]], 0.8, atol=1e-6)
    assert optimizador.m['opacidades'][1] == 0.0


def test_familia_congelada(config):
    parametros = {'nc': np.ones((2, 1, 2))}
    optimizador = OptimizadorAdam(config.con_tasas_nulas())
    optimizador.paso(parametros, {'nc': np.ones((2, 1, 2))}, 0)
    assert np.all(parametros['nc'] == 1.0)
    assert 'nc' not in optimizador.m


def test_gradientes_ausentes_no_se_tocan(config):
    parametros = {'f_v': np.ones(2), 'opacidades': np.ones(2)}
    OptimizadorAdam(config).paso(parametros, {'f_v': np.ones(2)}, 0)
    assert np.all(parametros['opacidades'] == 1.0)


def test_minimiza_una_cuadratica():
    config = ConfiguracionEntrenamiento(iteraciones=500, tasas={'f_v': (0.05, 0.005)})
    optimizador = OptimizadorAdam(config)
    parametros = {'f_v': np.array([3.0, -2.0])}
    for t in range(500):
        optimizador.paso(parametros, {'f_v': 2.0 * (parametros['f_v'] - 1.0)}, t)
    assert np.allclose(parametros['f_v'], 1.0, atol=1e-2)


def test_tensor_sin_familia(config):
    with pytest.raises(ErrorConfiguracion):
        OptimizadorAdam(config).paso({'x': np.zeros(1)}, {'x': np.ones(1)}, 0)


def test_fila_reactivada_retoma_su_propio_contador(config):
    """Una fila enmascarada durante varios pasos vuelve con un primer paso de lr·g/|g|."""
    parametros = {'opacidades': np.zeros((2, 2))}
    optimizador = OptimizadorAdam(config)
    solo_primera = {'opacidades': np.array([True, False])}
    for _ in range(5):
        optimizador.paso(parametros, {'opacidades': np.ones((2, 2))}, 0, mascaras_filas=solo_primera)
    assert list(optimizador.pasos['opacidades']) == [5, 0]
    assert np.all(parametros['opacidades'][1] == 0.0)

    solo_segunda = {'opacidades': np.array([False, True])}
    optimizador.paso(parametros, {'opacidades': np.array([[0.0, 0.0], [3.0, -0.5]])}, 0,
                     mascaras_filas=solo_segunda)
    assert np.allclose(parametros['opacidades'][1], [-0.2, 0.2], atol=1e-6)
    assert list(optimizador.pasos['opacidades']) == [5, 1]


def test_sin_mascara_todas_las_filas_avanzan(config):
    parametros = {'f_v': np.zeros((3, 2))}
    optimizador = OptimizadorAdam(config)
    optimizador.paso(parametros, {'f_v': np.ones((3, 2))}, 0, mascaras_filas={'f_v': np.array([True, False, True])})
    optimizador.paso(parametros, {'f_v': np.ones((3, 2))}, 1)
    assert list(optimizador.pasos['f_v']) == [2, 1, 2]
