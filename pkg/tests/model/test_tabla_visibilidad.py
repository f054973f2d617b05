import pytest
import logging
import numpy as np

from model.errores import ErrorConfiguracion
from model.escena.vista_camara import VistaCamara
from model.particion.tabla_visibilidad import supervision, visibility_stats

logging.disable(logging.CRITICAL)


# ============================================================
# Fixtures de Pytest
# ============================================================

@pytest.fixture
def camaras():
    """Cámara 1 mirando a +z y cámara 2 mirando a −z, ambas en el origen."""
    return [
        VistaCamara(id=1, rotacion=np.eye(3), traslacion=np.zeros(3), fx=10.0, fy=10.0, cx=5.0, cy=5.0,
                    ancho=10, alto=10),
        VistaCamara(id=2, rotacion=np.diag([-1.0, 1.0, -1.0]), traslacion=np.zeros(3), fx=10.0, fy=10.0,
                    cx=5.0, cy=5.0, ancho=10, alto=10),
    ]


@pytest.fixture
def puntos():
    return np.array([[0.0, 0.0, 2.0], [0.0, 0.0, -2.0], [100.0, 0.0, 2.0]])


# ============================================================
# Tests
# ============================================================

def test_conjuntos_visibles(camaras, puntos):
    tabla = visibility_stats(puntos, camaras, kappa=0.5)
    assert tabla.visibles == [frozenset({1}), frozenset({2}), frozenset()]
    assert tabla.conteos.tolist() == [1, 1, 0]


def test_media_y_umbral(camaras, puntos):
    tabla = visibility_stats(puntos, camaras, kappa=0.5)
    assert tabla.media == pytest.approx(2.0 / 3.0)
    assert tabla.umbral == pytest.approx(1.0 / 3.0)
    assert tabla.camaras() == [1, 2]


def test_kappa_fuera_de_rango(camaras, puntos):
    for kappa in (0.0, 1.0, 1.5):
        with pytest.raises(ErrorConfiguracion):
            visibility_stats(puntos, camaras, kappa=kappa)


def test_sin_puntos(camaras):
    tabla = visibility_stats(np.zeros((0, 3)), camaras)
    assert tabla.media == 0.0 and tabla.visibles == []


def test_supervision(camaras):
    puntos = np.array([[0.0, 0.0, 2.0], [0.1, 0.0, 3.0]])
    tabla = visibility_stats(puntos, camaras)
    assert supervision([0, 1], [1], tabla) == {0: 1, 1: 1}
    assert supervision([0], [2], tabla) == {0: 0}
