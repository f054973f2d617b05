"""
Inicializador del paquete de vistas.
""" 