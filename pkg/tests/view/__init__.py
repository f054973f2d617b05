"""
Inicializador del paquete de tests para las vistas.
"""
