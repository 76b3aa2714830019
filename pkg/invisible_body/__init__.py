"""Bodies invisible from two points, built from confocal conic arcs"""

__version__ = "1.0.0"
