"""Steady states of a coherently driven cavity mode coupled to a two-level atom.

Three engines: closed forms (:mod:`cavitylab.analytic`), the approximate
moment ODEs (:mod:`cavitylab.moments`) and an exact truncated Lindblad
oracle (:mod:`cavitylab.lindblad`), plus a Monte Carlo noise-correlation
check (:mod:`cavitylab.stochastic`).
"""
from .errors import CavityLabError, DomainError, NumericalError, SingularSystemError, TruncationError
from .model import ModelParams, RegimeLabel, TruncationSpec, regime_report, validate_params

__all__ = [
    "CavityLabError",
    "DomainError",
    "NumericalError",
    "SingularSystemError",
    "TruncationError",
    "ModelParams",
    "RegimeLabel",
    "TruncationSpec",
    "regime_report",
    "validate_params",
]

__version__ = "0.1.0"
