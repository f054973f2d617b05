"""
Inicializador del paquete de tests para los modelos.
"""