"""Inscribed squares in closed curves and inscribed simplices in spheres."""
__version__ = "0.1.0"
