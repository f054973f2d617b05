"""
Inicializador del paquete de pérdidas y métricas.
"""
