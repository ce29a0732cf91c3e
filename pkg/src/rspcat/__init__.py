"""Simulation of remote cat-state preparation by photon subtraction on a shared two-mode squeezed state."""

from . import analysis, fockcore, gaussianmodel, protocol, tomography
from ._kernels import BACKEND
from .errors import (
    CutoffTooLargeForOracle,
    CutoffTooSmall,
    DegenerateCat,
    NoSolution,
    NonConvergence,
    NumericError,
    RspcatError,
    Unphysical,
    VacuumSubtraction,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "analysis",
    "fockcore",
    "gaussianmodel",
    "protocol",
    "tomography",
    "CutoffTooLargeForOracle",
    "CutoffTooSmall",
    "DegenerateCat",
    "NoSolution",
    "NonConvergence",
    "NumericError",
    "RspcatError",
    "Unphysical",
    "VacuumSubtraction",
    "ValidationError",
]
