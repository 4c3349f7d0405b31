"""Localized, rigidly translating solutions of the free Schrodinger equation.

Families: Bessel beams, paraxial pulses, exact sinc-series pulses,
finite-energy pulses and harmonic-guide pulse trains, each checked against
independent numerical oracles (quadrature, finite-difference residual,
spectral free propagation).
"""
from importlib import metadata as _md

try:
    __version__ = _md.version("artifact")
except _md.PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .core import DomainError, PhysicalContext, comoving, kinematics  # noqa: E402
from .numerics import FieldEvaluator, FieldGrid, GridSpec  # noqa: E402

__all__ = ["__version__", "DomainError", "PhysicalContext", "comoving", "kinematics",
           "FieldEvaluator", "FieldGrid", "GridSpec"]
