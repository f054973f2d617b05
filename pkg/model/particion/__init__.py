"""
Inicializador del paquete de particionado y rotación de bloques.
"""
