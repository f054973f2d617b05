"""
Inicializador del paquete de muestreo micro-macro.
"""
