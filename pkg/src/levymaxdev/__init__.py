"""Projection estimation of Levy densities and the law of their maximal deviation."""

from .basis import BasisFamily, BasisSystem, Window, haar, legendre, trig
from .errors import DomainError, HypothesisError, ParameterError
from .estimator import Expansion, ProjectionEstimate, projection_estimate
from .levy import CompoundPoissonExp, GammaProcess, IncrementSample, sample_increments

__all__ = [
    "BasisFamily", "BasisSystem", "Window", "haar", "legendre", "trig",
    "DomainError", "HypothesisError", "ParameterError",
    "Expansion", "ProjectionEstimate", "projection_estimate",
    "CompoundPoissonExp", "GammaProcess", "IncrementSample", "sample_increments",
]

__version__ = "0.1.0"
