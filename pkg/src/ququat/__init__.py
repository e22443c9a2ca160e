"""Exact simulation of ququat teleportation with four-component coherent states."""

from .basis import AlphaBasis, make_basis
from .coherent import CoherentSuperposition
from .errors import (
    ArityError,
    DegenerateInputError,
    DomainError,
    QuquatError,
    ResourceError,
    SingularityError,
    UnsupportedSupportError,
)
from .teleport import PCClass, TeleportSimulator

__all__ = [
    "AlphaBasis",
    "ArityError",
    "CoherentSuperposition",
    "DegenerateInputError",
    "DomainError",
    "PCClass",
    "QuquatError",
    "ResourceError",
    "SingularityError",
    "TeleportSimulator",
    "UnsupportedSupportError",
    "make_basis",
]
