"""Hitting-time laboratory for rotations, torus translations and their flows."""
from .cf import ContinuedFraction, convergents, norm_q_alpha, type_estimate, value
from .errors import (
    ConfigError, DegenerateBallError, DepthError, EstimationError, HitlabError,
    HorizonError, NeverHitsError, ResourceError, UnsupportedSystemError,
)

__version__ = "0.1.0"

__all__ = [
    "ContinuedFraction", "convergents", "norm_q_alpha", "type_estimate", "value",
    "ConfigError", "DegenerateBallError", "DepthError", "EstimationError", "HitlabError",
    "HorizonError", "NeverHitsError", "ResourceError", "UnsupportedSystemError",
]
