"""
Inicializador del paquete de controladores.
""" 