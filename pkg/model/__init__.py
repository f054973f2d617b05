"""
Inicializador del paquete de modelos.
""" 