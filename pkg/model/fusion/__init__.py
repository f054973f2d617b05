"""
Inicializador del paquete de la red de fusión.
"""
