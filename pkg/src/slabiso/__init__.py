"""Isoperimetric problems in slabs: the 3-cube profile, Gaussian slabs and
high-dimensional cubes."""

__version__ = "0.1.0"

__all__ = ["special_fn", "profile", "unduloid", "cube3", "gauss_slab", "cube_nd", "cli"]
