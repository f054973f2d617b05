"""
Inicializador del paquete de la escena: Gaussianas, anclas, cámaras y su persistencia.
"""
