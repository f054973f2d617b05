"""
Inicializador del paquete del rasterizador.
"""
