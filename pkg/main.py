"""
Script principal: interpreta la línea de órdenes y delega cada subcomando en el
controlador del pipeline.
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

# Añadir el directorio raíz al sys.path para asegurar que los módulos se encuentren
current_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.append(current_dir)

from controller.controlador_pipeline import ControladorPipeline  # noqa: E402
from model.configuracion_escena import ConfiguracionEscena  # noqa: E402
from model.errores import ErrorSplat  # noqa: E402


def construir_parser() -> argparse.ArgumentParser:
    """Define los subcomandos y sus opciones."""
    parser = argparse.ArgumentParser(prog='splat-escritorio',
                                     description="Pipeline de Gaussian Splatting multi-escala.")
    sub = parser.add_subparsers(dest='comando', required=True)

    p = sub.add_parser('gen', help="Genera una escena sintética.")
    p.add_argument('--preset', choices=('tiny', 'medium', 'toy'), default='tiny')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out', required=True, help="Directorio de la escena.")

    p = sub.add_parser('import', help="Importa ficheros de texto tipo COLMAP.")
    p.add_argument('--points', required=True)
    p.add_argument('--cameras', required=True)
    p.add_argument('--images', default=None, help="Directorio base de las imágenes.")
    p.add_argument('--held-out', type=int, nargs='*', default=[], help="Ids de cámaras retenidas.")
    p.add_argument('--out', required=True)

    p = sub.add_parser('render', help="Renderiza una vista a PNG.")
    p.add_argument('--scene', required=True)
    p.add_argument('--view', type=int, required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--raw', default=None, help="Volcado float32 opcional.")

    p = sub.add_parser('dwt-check', help="Comprueba la DWT de Haar en un mapa aleatorio.")
    p.add_argument('--size', default='32x32', help="Alto×ancho, p. ej. 32x48.")
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--channels', type=int, default=4)

    p = sub.add_parser('sample-viz', help="Dibuja las muestras micro-macro de un ancla.")
    p.add_argument('--scene', required=True)
    p.add_argument('--anchor', type=int, required=True)
    p.add_argument('--view', type=int, required=True)
    p.add_argument('--out', default='muestras.png')

    p = sub.add_parser('eval', help="Métricas por vista en TSV.")
    p.add_argument('--scene', required=True)
    p.add_argument('--views', default=None, help="JSON con la lista de ids de vista.")
    p.add_argument('--config', default=None, help="train.toml para ajustar la apariencia de las retenidas.")

    p = sub.add_parser('partition', help="Particiona la escena en bloques.")
    p.add_argument('--scene', required=True)
    p.add_argument('--grid', default='2x2', help="Filas×columnas, p. ej. 2x2.")
    p.add_argument('--kappa', type=float, default=None)
    p.add_argument('--eta', type=float, default=None)
    p.add_argument('--out', required=True)

    p = sub.add_parser('schedule', help="Imprime el calendario de rotación.")
    p.add_argument('--blocks', type=int, required=True)
    p.add_argument('--slots', type=int, required=True)
    p.add_argument('--niter', type=int, required=True)
    p.add_argument('--total', type=int, required=True)
    p.add_argument('--alternate', action='store_true', help="Alterna periodos de escena completa.")

    p = sub.add_parser('train', help="Entrena una escena.")
    p.add_argument('--scene', required=True)
    p.add_argument('--config', default=None)
    p.add_argument('--out', required=True)
    p.add_argument('--log', default=None)
    p.add_argument('--blocks', default=None, help="Directorio con los manifiestos de bloque.")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Carga el entorno, configura el logging y ejecuta el subcomando pedido.
    """
    load_dotenv()
    # Configuración de logging
    logging.basicConfig(
        level=os.getenv('SPLAT_NIVEL_LOG', 'INFO').upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stdout)
        ]
    )
    args = construir_parser().parse_args(argv)
    try:
        config = ConfiguracionEscena.desde_entorno()
    except ErrorSplat as e:
        logging.getLogger(__name__).error(f"Configuración de entorno no válida: {e}")
        return 1
    if args.comando == 'partition':
        args.kappa = config.kappa if args.kappa is None else args.kappa
        args.eta = config.eta if args.eta is None else args.eta
    return ControladorPipeline(config).ejecutar(args)


if __name__ == "__main__":
    sys.exit(main())
