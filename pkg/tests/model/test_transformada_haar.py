import pytest
import logging
import numpy as np

from model.errores import ErrorEntradaInvalida
from model.wavelet.transformada_haar import (ConjuntoSubbandas, descomposicion_paquetes,
                                             descomposicion_paquetes_adjunta, dwt1, dwt1_adjunta, idwt1)

logging.disable(logging.CRITICAL)


# ============================================================
# Fixtures de Pytest
# ============================================================

@pytest.fixture
def rng():
    return np.random.default_rng(21)


@pytest.fixture
def mapa_aleatorio(rng):
    return rng.standard_normal((3, 8, 8))


# ============================================================
# dwt1 / idwt1
# ============================================================

def test_mapa_constante():
    """LL = 2c y el resto de bandas es nulo."""
    bandas = dwt1(np.full((1, 4, 4), 1.5))
    assert np.allclose(bandas.LL, 3.0)
    for banda in (bandas.LH, bandas.HL, bandas.HH):
        assert np.allclose(banda, 0.0)


def test_bloque_2x2():
    a, b, c, d = 1.0, 2.0, 3.0, 5.0
    bandas = dwt1(np.array([[[a, b], [c, d]]]))
    assert bandas.LL[0, 0, 0] == pytest.approx((a + b + c + d) / 2)
    assert bandas.LH[0, 0, 0] == pytest.approx((a + b - c - d) / 2)
    assert bandas.HL[0, 0, 0] == pytest.approx((a - b + c - d) / 2)
    assert bandas.HH[0, 0, 0] == pytest.approx((a - b - c + d) / 2)


def test_mapa_nulo():
    bandas = dwt1(np.zeros((2, 6, 4)))
    assert all(np.all(b == 0.0) for b in (bandas.LL, bandas.LH, bandas.HL, bandas.HH))
    assert bandas.LL.shape == (2, 3, 2)


def test_entrada_vacia():
    with pytest.raises(ErrorEntradaInvalida):
        dwt1(np.zeros((1, 0, 4)))


def test_reconstruccion_perfecta(mapa_aleatorio):
    assert np.max(np.abs(idwt1(dwt1(mapa_aleatorio)) - mapa_aleatorio)) < 1e-10


def test_conservacion_de_energia(mapa_aleatorio):
    bandas = dwt1(mapa_aleatorio)
    energia = sum(np.sum(b ** 2) for b in (bandas.LL, bandas.LH, bandas.HL, bandas.HH))
    assert energia == pytest.approx(np.sum(mapa_aleatorio ** 2), abs=1e-9)


def test_bandas_nulas_dan_mapa_nulo():
    ceros = np.zeros((1, 2, 2))
    assert np.all(idwt1(ConjuntoSubbandas(ceros, ceros, ceros, ceros)) == 0.0)


def test_solo_ll_de_constante():
    """Las bandas LL de un mapa constante reconstruyen la constante."""
    ceros = np.zeros((1, 2, 2))
    assert np.allclose(idwt1(ConjuntoSubbandas(np.full((1, 2, 2), 4.0), ceros, ceros, ceros)), 2.0)


def test_tamano_impar_ida_y_vuelta(rng):
    """Con relleno por replicación la ida y vuelta recupera el tamaño original."""
    F = rng.standard_normal((2, 5, 7))
    bandas = dwt1(F)
    assert bandas.LL.shape == (2, 3, 4)
    assert np.allclose(idwt1(bandas), F, atol=1e-12)


@pytest.mark.parametrize('forma', [(2, 8, 6), (1, 5, 7)])
def test_adjunta_un_nivel(rng, forma):
    """⟨dwt1(F), G⟩ = ⟨F, dwt1ᵀ(G)⟩, también con relleno."""
    F = rng.standard_normal(forma)
    bandas = dwt1(F)
    G = ConjuntoSubbandas.desde_pila(rng.standard_normal(bandas.apilar().shape), forma[1:])
    izquierda = float(np.sum(bandas.apilar() * G.apilar()))
    derecha = float(np.sum(F * dwt1_adjunta(G)))
    assert izquierda == pytest.approx(derecha, abs=1e-10)


# ============================================================
# Paquetes de m niveles
# ============================================================

def test_paquetes_consistencia_recursiva(mapa_aleatorio):
    """Los sub-mapas 4b..4b+3 del nivel 2 son dwt1 de la banda b del nivel 1."""
    nivel1 = descomposicion_paquetes(mapa_aleatorio, 1)
    nivel2 = descomposicion_paquetes(mapa_aleatorio, 2)
    assert nivel2.shape == (16, 3, 2, 2)
    for b in range(4):
        assert np.allclose(nivel2[4 * b:4 * b + 4], dwt1(nivel1[b]).apilar())


def test_paquetes_conservan_energia(mapa_aleatorio):
    assert np.sum(descomposicion_paquetes(mapa_aleatorio, 2) ** 2) == pytest.approx(
        np.sum(mapa_aleatorio ** 2), abs=1e-9)


@pytest.mark.parametrize('forma, niveles', [((2, 8, 8), 2), ((1, 6, 5), 2), ((3, 4, 4), 0)])
def test_adjunta_paquetes(rng, forma, niveles):
    F = rng.standard_normal(forma)
    D = descomposicion_paquetes(F, niveles)
    G = rng.standard_normal(D.shape)
    izquierda = float(np.sum(D * G))
    derecha = float(np.sum(F * descomposicion_paquetes_adjunta(G, forma, niveles)))
    assert izquierda == pytest.approx(derecha, abs=1e-10)
