import pytest
import logging
import numpy as np

from model.configuracion_escena import ConfiguracionEscena
from model.errores import ErrorEntradaInvalida
from model.escena.importador_colmap import importar_colmap, leer_camaras, leer_puntos, voxelizar

logging.disable(logging.CRITICAL)

PUNTOS = """# id x y z
1 0.1 0.1 0.1
2 0.2 0.3 0.1 255 0 0

3 1.2 0.1 0.0
4 1.3 0.4 0.2
"""

CAMARAS = """# id qw qx qy qz tx ty tz fx fy cx cy W H imagen
10 1 0 0 0 -0.5 0 4 20 20 7.5 7.5 16 16 img 10.png
11 1 0 0 0 -1.0 0 4 20 20 7.5 7.5 16 16 img11.png
"""


# ============================================================
# Fixtures de Pytest
# ============================================================

@pytest.fixture
def ficheros(tmp_path):
    ruta_puntos = tmp_path / 'points3D.txt'
    ruta_camaras = tmp_path / 'cameras.txt'
    ruta_puntos.write_text(PUNTOS, encoding='utf-8')
    ruta_camaras.write_text(CAMARAS, encoding='utf-8')
    return str(ruta_puntos), str(ruta_camaras)


@pytest.fixture
def config():
    return ConfiguracionEscena.desde_preset('toy', tamano_voxel=1.0)


# ============================================================
# Tests
# ============================================================

def test_leer_puntos_ignora_comentarios_y_color(ficheros):
    puntos = leer_puntos(ficheros[0])
    assert sorted(puntos) == [1, 2, 3, 4]
    assert np.allclose(puntos[2], [0.2, 0.3, 0.1])


def test_leer_camaras_ruta_con_espacios(ficheros):
    camaras = leer_camaras(ficheros[1])
    assert [c['id'] for c in camaras] == [10, 11]
    assert camaras[0]['imagen'] == 'img 10.png'
    assert camaras[0]['ancho'] == 16 and camaras[0]['alto'] == 16


def test_linea_mal_formada(tmp_path):
    ruta = tmp_path / 'malo.txt'
    ruta.write_text("1 0.0 abc 0.0\n", encoding='utf-8')
    with pytest.raises(ErrorEntradaInvalida):
        leer_puntos(str(ruta))


def test_camara_con_columnas_insuficientes(tmp_path):
    ruta = tmp_path / 'camaras.txt'
    ruta.write_text("1 1 0 0 0 0 0 0\n", encoding='utf-8')
    with pytest.raises(ErrorEntradaInvalida):
        leer_camaras(str(ruta))


def test_voxelizar():
    """Un centro por vóxel ocupado."""
    centros = voxelizar(np.array([[0.1, 0.1, 0.1], [0.4, 0.2, 0.3], [1.2, 0.1, 0.0]]), 1.0)
    assert np.allclose(centros, [[0.5, 0.5, 0.5], [1.5, 0.5, 0.5]])


def test_importar_construye_escena(ficheros, config):
    escena = importar_colmap(ficheros[0], ficheros[1], config, retenidas=(11,))
    assert len(escena.anclas) == 2
    assert [v.id for v in escena.vistas] == [10, 11]
    assert escena.vista(11).entrenamiento is False
    assert np.allclose(escena.vista(10).centro, [0.5, 0.0, -4.0])
    assert escena.puntos.shape == (4, 3)
    assert escena.metadatos['origen'] == 'colmap'


def test_importar_con_cargador_de_imagenes(ficheros, config, tmp_path):
    rutas = []

    def cargador(ruta):
        rutas.append(ruta)
        return np.full((16, 16, 3), 0.5)

    escena = importar_colmap(ficheros[0], ficheros[1], config, cargador, str(tmp_path))
    assert rutas[0] == str(tmp_path / 'img 10.png')
    assert escena.vista(10).imagen_gt.shape == (16, 16, 3)


def test_importar_sin_puntos(tmp_path, ficheros, config):
    vacio = tmp_path / 'vacio.txt'
    vacio.write_text("# nada\n", encoding='utf-8')
    with pytest.raises(ErrorEntradaInvalida):
        importar_colmap(str(vacio), ficheros[1], config)
