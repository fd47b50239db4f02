"""Threshold ARCH(1) volatility model toolkit."""

from tarch.dist import Gaussian, InnovationModel, Laplace, PointMass, StudentT, gaussian
from tarch.model import ModelParams, Path, State, psi, simulate_path, step

__all__ = [
    "Gaussian",
    "InnovationModel",
    "Laplace",
    "ModelParams",
    "Path",
    "PointMass",
    "State",
    "StudentT",
    "gaussian",
    "psi",
    "simulate_path",
    "step",
]

__version__ = "0.1.0"
