import pytest
import logging
import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorEntradaInvalida, ErrorGeometriaDegenerada
from model.escena.vista_camara import VistaCamara

logging.disable(logging.CRITICAL)


# ============================================================
# Fixtures de Pytest
# ============================================================

@pytest.fixture
def camara_frontal():
    """Cámara en el origen mirando a +z, f=100, punto principal (50,50)."""
    return VistaCamara(id=0, rotacion=np.eye(3), traslacion=np.zeros(3), fx=100.0, fy=100.0,
                       cx=50.0, cy=50.0, ancho=101, alto=101)


# ============================================================
# Tests
# ============================================================

def test_punto_en_el_eje_optico(camara_frontal):
    uv = camara_frontal.proyectar_punto(np.array([0.0, 0.0, 5.0]))
    assert np.allclose(uv, [50.0, 50.0])


def test_punto_detras_de_la_camara(camara_frontal):
    assert camara_frontal.proyectar_punto(np.array([0.0, 0.0, -1.0])) is None


def test_centro_de_camara():
    vista = VistaCamara(id=1, rotacion=np.eye(3), traslacion=np.array([0.0, 0.0, 3.0]), fx=1.0, fy=1.0,
                        cx=0.0, cy=0.0, ancho=2, alto=2)
    assert np.allclose(vista.centro, [0.0, 0.0, -3.0])


def test_rotacion_no_ortonormal():
    with pytest.raises(ErrorEntradaInvalida):
        VistaCamara(id=0, rotacion=np.diag([1.0, 1.0, 1.001]), traslacion=np.zeros(3), fx=1.0, fy=1.0,
                    cx=0.0, cy=0.0, ancho=2, alto=2)


def test_imagen_con_forma_incorrecta():
    with pytest.raises(ErrorEntradaInvalida):
        VistaCamara(id=0, rotacion=np.eye(3), traslacion=np.zeros(3), fx=1.0, fy=1.0, cx=0.0, cy=0.0,
                    ancho=4, alto=3, imagen_gt=np.zeros((4, 3, 3)))


def test_mirando_a_proyecta_el_objetivo_al_centro():
    """El objetivo queda en el punto principal."""
    vista = VistaCamara.mirando_a(3, np.array([3.0, 0.0, 1.5]), np.zeros(3), focal=30.0, ancho=25, alto=25)
    uv = vista.proyectar_punto(np.zeros(3))
    assert np.allclose(uv, [12.0, 12.0], atol=1e-9)
    assert np.allclose(vista.centro, [3.0, 0.0, 1.5], atol=1e-9)


def test_mirando_a_degenerado():
    with pytest.raises(ErrorGeometriaDegenerada):
        VistaCamara.mirando_a(0, np.array([0.0, 0.0, 5.0]), np.zeros(3), focal=10.0, ancho=8, alto=8)


def test_dentro_de_imagen(camara_frontal):
    uv = np.array([[0.0, 0.0], [100.9, 50.0], [101.0, 50.0], [-0.1, 3.0]])
    assert camara_frontal.dentro_de_imagen(uv).tolist() == [True, True, False, False]


def test_inicializar_apariencia():
    """f_g y F^MAP con las formas de la configuración y escala 0.01."""
    config = ConfiguracionEscena()
    vista = VistaCamara.mirando_a(0, np.array([4.0, 0.0, 2.0]), np.zeros(3), focal=60.0, ancho=64, alto=48)
    vista.inicializar_apariencia(config, np.random.default_rng(0))
    assert vista.f_g.shape == (config.n_g,)
    assert vista.mapa.shape == (config.n_r, 12, 16)
    assert np.abs(vista.mapa).max() < 0.1
    assert np.allclose(vista.escala_mapa, [0.25, 0.25])
    vista.validar(config)


def test_validar_mapa_demasiado_pequeno():
    config = ConfiguracionEscena(M=2, n_r=36)
    vista = VistaCamara.mirando_a(0, np.array([4.0, 0.0, 2.0]), np.zeros(3), focal=60.0, ancho=8, alto=8)
    vista.f_g = np.zeros(config.n_g)
    vista.mapa = np.zeros((config.n_r, 2, 2))
    with pytest.raises(ErrorEntradaInvalida):
        vista.validar(config)


def test_direccion_desde_camara(camara_frontal):
    d = camara_frontal.direccion_desde_camara(np.array([0.0, 0.0, 7.0]))
    assert np.allclose(d, [[0.0, 0.0, 1.0]])
