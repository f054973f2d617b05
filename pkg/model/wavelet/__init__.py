"""
Inicializador del paquete de la transformada wavelet.
"""
