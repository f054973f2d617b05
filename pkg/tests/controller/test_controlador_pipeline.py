"""
Tests unitarios para la clase ControladorPipeline.
Verifica el despacho de subcomandos, la salida TSV y el guardado de escenas y bloques.
"""

import unittest
from unittest.mock import MagicMock, patch
import argparse
import io
import logging
import os
import sys
import tempfile

import numpy as np

# Añadir el directorio raíz al sys.path para que encuentre los módulos controller, model, view
current_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(current_dir))
sys.path.append(project_root)

from controller.controlador_pipeline import (ControladorPipeline, cargar_bloques, guardar_bloques,  # noqa: E402
                                             leer_dimensiones)
from main import construir_parser  # noqa: E402
from model.errores import ErrorEntradaInvalida, ErrorGeometriaDegenerada  # noqa: E402
from model.particion.bloque import Bloque  # noqa: E402

logging.disable(logging.CRITICAL)

LIMITES = (-np.inf, 0.0, -np.inf, np.inf)

TOML_CORTO = """
[entrenamiento]
preset = "escritorio"
iteraciones = 2
"""


def lineas_tsv(salida: io.StringIO):
    return [linea.split('\t') for linea in salida.getvalue().splitlines()]


class TestFuncionesAuxiliares(unittest.TestCase):
    """
    Tests para la lectura de dimensiones y los manifiestos de bloque.
    """

    def test_leer_dimensiones(self):
        self.assertEqual(leer_dimensiones('64x48'), (64, 48))
        self.assertEqual(leer_dimensiones('2X3'), (2, 3))

    def test_leer_dimensiones_mal_formadas(self):
        for texto in ('64', '64x', 'axb', '1x2x3'):
            with self.assertRaises(ErrorEntradaInvalida):
                leer_dimensiones(texto)

    def test_bloques_ida_y_vuelta(self):
        bloque = Bloque(id=1, fila=0, columna=1, ejes=(0, 1), limites=LIMITES, limites_celda=LIMITES,
                        anclas=[2, 5])
        bloque.asignar_camara(3, 'inicial')
        otro = Bloque(id=0, fila=0, columna=0, ejes=(0, 1), limites=LIMITES, limites_celda=LIMITES, anclas=[0])
        with tempfile.TemporaryDirectory() as directorio:
            rutas = guardar_bloques([bloque, otro], directorio)
            self.assertEqual([os.path.basename(r) for r in rutas], ['bloque_001.json', 'bloque_000.json'])
            cargados = cargar_bloques(directorio)
        self.assertEqual([b.id for b in cargados], [0, 1])
        self.assertEqual(cargados[1].anclas, [2, 5])
        self.assertEqual(cargados[1].limites[0], -np.inf)

    def test_cargar_bloques_sin_manifiestos(self):
        with tempfile.TemporaryDirectory() as directorio:
            with self.assertRaises(ErrorEntradaInvalida):
                cargar_bloques(directorio)
            with self.assertRaises(ErrorEntradaInvalida):
                cargar_bloques(os.path.join(directorio, 'no_existe'))


class TestControladorPipelineSalidaTexto(unittest.TestCase):
    """
    Tests de los subcomandos que solo escriben tablas.
    """

    def setUp(self):
        self.salida = io.StringIO()
        self.controlador = ControladorPipeline(salida=self.salida)

    def test_calendario(self):
        tabla = self.controlador.calendario(5, 2, 10, 20)
        self.assertEqual(tabla, [[0, 0, 10, 0, 1], [1, 10, 20, 2, 3]])
        lineas = lineas_tsv(self.salida)
        self.assertEqual(lineas[0], ['periodo', 'inicio', 'fin', 'ranura_0', 'ranura_1'])
        self.assertEqual(lineas[2], ['1', '10', '20', '2', '3'])

    def test_dwt_check(self):
        resultado = self.controlador.dwt_check(8, 8, semilla=0)
        self.assertLess(resultado['error_reconstruccion'], 1e-10)
        self.assertLess(resultado['error_energia'], 1e-10)
        lineas = lineas_tsv(self.salida)
        self.assertEqual(lineas[0], ['medida', 'valor'])
        self.assertEqual([fila[0] for fila in lineas[1:]], ['error_reconstruccion', 'error_energia'])

    def test_dwt_check_tamano_impar_reconstruye(self):
        resultado = self.controlador.dwt_check(7, 5, semilla=1, canales=2)
        self.assertLess(resultado['error_reconstruccion'], 1e-10)


class TestControladorPipelineDespacho(unittest.TestCase):
    """
    Tests para `ejecutar`: cada subcomando llega a su método y los errores del
    modelo se traducen en código de salida 1.
    """

    def setUp(self):
        self.controlador = ControladorPipeline(salida=io.StringIO())

    def test_schedule_devuelve_cero(self):
        args = construir_parser().parse_args(['schedule', '--blocks', '4', '--slots', '2', '--niter', '5',
                                              '--total', '20', '--alternate'])
        self.assertEqual(self.controlador.ejecutar(args), 0)

    @patch.object(ControladorPipeline, 'generar')
    def test_error_del_modelo_devuelve_uno(self, mock_generar):
        mock_generar.side_effect = ErrorGeometriaDegenerada("punto coincidente")
        args = construir_parser().parse_args(['gen', '--out', 'x'])
        self.assertEqual(self.controlador.ejecutar(args), 1)
        mock_generar.assert_called_once_with('tiny', 0, 'x')

    @patch.object(ControladorPipeline, 'particionar')
    def test_partition_lee_la_rejilla(self, mock_particionar):
        args = construir_parser().parse_args(['partition', '--scene', 's', '--grid', '3x2', '--kappa', '0.5',
                                              '--eta', '0.1', '--out', 'b'])
        self.assertEqual(self.controlador.ejecutar(args), 0)
        mock_particionar.assert_called_once_with('s', 3, 2, 0.5, 0.1, 'b')

    def test_rejilla_mal_formada_devuelve_uno(self):
        args = argparse.Namespace(comando='partition', scene='s', grid='3', kappa=0.5, eta=0.1, out='b')
        self.assertEqual(self.controlador.ejecutar(args), 1)

    def test_subcomando_desconocido(self):
        self.assertEqual(self.controlador.ejecutar(argparse.Namespace(comando='volar')), 1)

    @patch('controller.controlador_pipeline.guardar_png')
    @patch('controller.controlador_pipeline.guardar_escena')
    @patch('controller.controlador_pipeline.generar_escena')
    def test_generar_guarda_escena_e_imagenes(self, mock_generar_escena, mock_guardar_escena, mock_guardar_png):
        vista = MagicMock(nombre_imagen='vista_000.png')
        mock_generar_escena.return_value = MagicMock(vistas=[vista])
        escena = self.controlador.generar('toy', 4, 'salida')
        mock_generar_escena.assert_called_once_with('toy', 4)
        mock_guardar_escena.assert_called_once_with(escena, 'salida')
        mock_guardar_png.assert_called_once_with(vista.imagen_gt, os.path.join('salida', 'vista_000.png'))

    @patch('controller.controlador_pipeline.guardar_escena')
    @patch('controller.controlador_pipeline.train')
    @patch('controller.controlador_pipeline.cargar_escena')
    def test_entrenar_escribe_el_registro(self, mock_cargar_escena, mock_train, mock_guardar_escena):
        registro = MagicMock(tiempos={})
        mock_train.return_value = ('entrenada', registro)
        self.controlador.entrenar('escena', None, 'salida')
        self.assertIsNone(mock_train.call_args[0][2])
        mock_guardar_escena.assert_called_once_with('entrenada', 'salida')
        registro.escribir_tsv.assert_called_once_with(os.path.join('salida', 'log.tsv'))


class TestControladorPipelineExtremoAExtremo(unittest.TestCase):
    """
    Recorre gen → render → sample-viz → partition → train sobre la escena toy.
    """

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.raiz = self._tmp.name
        self.escena = os.path.join(self.raiz, 'escena')
        self.controlador = ControladorPipeline(salida=io.StringIO())
        self.controlador.generar('toy', 0, self.escena)

    def tearDown(self):
        self._tmp.cleanup()

    def test_generar_escribe_las_imagenes(self):
        self.assertTrue(os.path.exists(os.path.join(self.escena, 'vista_000.png')))

    def test_render(self):
        ruta_png = os.path.join(self.raiz, 'render.png')
        ruta_raw = os.path.join(self.raiz, 'render.f32')
        imagen = self.controlador.renderizar(self.escena, 0, ruta_png, ruta_raw)
        self.assertEqual(imagen.shape, (24, 24, 3))
        self.assertTrue(os.path.exists(ruta_png))
        self.assertEqual(os.path.getsize(ruta_raw), imagen.size * 4)

    def test_sample_viz_ancla_inexistente(self):
        with self.assertRaises(ErrorEntradaInvalida):
            self.controlador.sample_viz(self.escena, 99, 0, os.path.join(self.raiz, 'm.png'))

    def test_particionar_y_entrenar(self):
        directorio_bloques = os.path.join(self.raiz, 'bloques')
        bloques = self.controlador.particionar(self.escena, 1, 2, 0.5, 0.0, directorio_bloques)
        self.assertEqual(len(bloques), 2)
        self.assertTrue(os.path.exists(os.path.join(directorio_bloques, 'histograma_supervision.tsv')))
        self.assertEqual([b.id for b in cargar_bloques(directorio_bloques)], [0, 1])

        ruta_config = os.path.join(self.raiz, 'train.toml')
        with open(ruta_config, 'w', encoding='utf-8') as fichero:
            fichero.write(TOML_CORTO)
        salida = os.path.join(self.raiz, 'entrenada')
        self.controlador.entrenar(self.escena, ruta_config, salida)
        with open(os.path.join(salida, 'log.tsv'), 'r', encoding='utf-8') as fichero:
            self.assertEqual(len(fichero.read().splitlines()), 3)


if __name__ == '__main__':
    unittest.main()
