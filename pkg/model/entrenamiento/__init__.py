"""
Inicializador del paquete de entrenamiento.
"""
