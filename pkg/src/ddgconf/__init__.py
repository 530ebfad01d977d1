"""Discrete conformal machinery on planar triangular meshes.

Cross-ratio conformality tests, cotan-harmonic functions, discrete
holomorphic quadratic differentials, infinitesimal conformal and pattern
deformations, the sl(2,C) deformation calculus, and the discrete Weierstrass
representation of minimal surfaces.
"""

from . import deform, errors, fileio, hqd, laplace, mesh, moebius, realization, weierstrass
from .mesh import TriMesh, build
from .realization import Realization

__all__ = [
    "TriMesh",
    "Realization",
    "build",
    "deform",
    "errors",
    "fileio",
    "hqd",
    "laplace",
    "mesh",
    "moebius",
    "realization",
    "weierstrass",
]

__version__ = "0.1.0"
