"""simplexlab: volumes of regular spherical simplices and rationality experiments on f(t)."""

__version__ = "0.1.0"
