"""Numerical checks for Hessian metrics whose inverse is again a Hessian."""

from . import catalog, connection, funcspace, handles, jets2d, legendre, matgeo, poisson, propi
from .errors import HessinvError

__all__ = [
    "HessinvError",
    "catalog",
    "connection",
    "funcspace",
    "handles",
    "jets2d",
    "legendre",
    "matgeo",
    "poisson",
    "propi",
]
