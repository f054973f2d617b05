import pytest
import logging
import numpy as np

from model.entrenamiento.generador_sintetico import GeneradorSintetico, aplicar_apariencia, generar_escena

logging.disable(logging.CRITICAL)


# ============================================================
# Fixtures de Pytest
# ============================================================

@pytest.fixture(scope='module')
def escena_toy():
    return generar_escena('toy', semilla=3)


# ============================================================
# Tests
# ============================================================

def test_estructura_toy(escena_toy):
    assert len(escena_toy.anclas) == 4
    assert escena_toy.num_gaussianas == 4 * escena_toy.config.k
    assert [v.entrenamiento for v in escena_toy.vistas] == [True, True, True, False]
    assert escena_toy.metadatos['origen'] == 'sintetico'
    assert escena_toy.puntos.shape == (escena_toy.num_gaussianas, 3)


def test_imagenes_de_referencia(escena_toy):
    for vista in escena_toy.vistas:
        assert vista.imagen_gt.shape == (24, 24, 3)
        assert np.all((vista.imagen_gt >= 0.0) & (vista.imagen_gt <= 1.0))
        assert vista.imagen_gt.max() > 0.0
        assert vista.nombre_imagen == f'vista_{vista.id:03d}.png'


def test_misma_semilla_misma_escena(escena_toy):
    otra = generar_escena('toy', semilla=3)
    assert np.array_equal(otra.centros_anclas(), escena_toy.centros_anclas())
    assert np.array_equal(otra.vista(1).imagen_gt, escena_toy.vista(1).imagen_gt)
    assert np.array_equal(otra.vista(2).mapa, escena_toy.vista(2).mapa)


def test_semilla_distinta(escena_toy):
    otra = generar_escena('toy', semilla=4)
    assert not np.array_equal(otra.centros_anclas(), escena_toy.centros_anclas())


def test_preset_desconocido():
    generador = GeneradorSintetico('enorme')
    assert generador.preset == 'tiny'
    assert generador.parametros['anclas'] * generador.config.k == 100


def test_apariencia_neutra():
    imagen = np.random.default_rng(0).uniform(0.0, 1.0, (8, 8, 3))
    assert np.allclose(aplicar_apariencia(imagen, np.ones(3), vineteado=0.0), imagen)


def test_vineteado_oscurece_las_esquinas():
    resultado = aplicar_apariencia(np.full((9, 9, 3), 0.5), np.ones(3))
    assert resultado[4, 4, 0] == pytest.approx(0.5)
    assert resultado[0, 0, 0] < resultado[4, 4, 0]
