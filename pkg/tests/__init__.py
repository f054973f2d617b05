"""
Inicializador del paquete de tests.
""" 