import pytest
from unittest.mock import patch

from model.entrenamiento.cronometro import Cronometro


# ============================================================
# Tests
# ============================================================

@patch('model.entrenamiento.cronometro.time.monotonic')
def test_cambio_de_fase_acumula_la_anterior(mock_monotonic):
    mock_monotonic.side_effect = [0.0, 2.0, 2.0, 5.0]
    cronometro = Cronometro()
    cronometro.iniciar('forward')
    cronometro.iniciar('backward')
    cronometro.detener()
    assert cronometro.get_tiempo('forward') == pytest.approx(2.0)
    assert cronometro.get_tiempo('backward') == pytest.approx(3.0)
    assert cronometro.total() == pytest.approx(5.0)
    assert cronometro.fase_activa is None


@patch('model.entrenamiento.cronometro.time.monotonic')
def test_medir_con_bloque_with(mock_monotonic):
    mock_monotonic.side_effect = [10.0, 11.5]
    cronometro = Cronometro()
    with cronometro.medir('actualizacion'):
        pass
    assert cronometro.get_tiempo('actualizacion') == pytest.approx(1.5)


def test_fase_no_medida():
    assert Cronometro().get_tiempo('render') == 0.0


@patch('model.entrenamiento.cronometro.time.monotonic')
def test_reiniciar(mock_monotonic):
    mock_monotonic.side_effect = [0.0, 1.0]
    cronometro = Cronometro()
    cronometro.iniciar('forward')
    cronometro.reiniciar()
    assert cronometro.tiempos == {}
    assert 'Activa: None' in str(cronometro)
