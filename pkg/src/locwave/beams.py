"""Monochromatic Bessel beams of the free Schrodinger equation.

A beam ``J_n(rho p_rho / hbar) exp(i (z p_z - E t) / hbar + i n phi)`` solves
the equation when ``p_rho^2 + p_z^2 = 2 m E``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, PhysicalContext
from .numerics import FieldEvaluator
from .specfun import bessel_j


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class BesselBeamParams:
    ctx: PhysicalContext
    E: float
    p_z: float
    n: int = 0

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise DomainError(f"order n must be a non-negative integer, got {self.n!r}")
        if self.p_z < 0:
            raise DomainError("p_z >= 0 required (forward-travelling beam)")
        if self.E < self.p_z**2 / (2 * self.ctx.mass) * (1 - 1e-14):
            raise DomainError(
                f"E >= p_z^2/(2m) violated: E={self.E!r} < {self.p_z**2 / (2 * self.ctx.mass)!r}"
                " (transverse momentum would be imaginary)"
            )

    @property
    def p_rho(self) -> float:
        return math.sqrt(max(2 * self.ctx.mass * self.E - self.p_z**2, 0.0))

    @property
    def k_rho(self) -> float:
        return self.p_rho / self.ctx.hbar

    @property
    def k_z(self) -> float:
        return self.p_z / self.ctx.hbar

    @property
    def phase_velocity(self) -> float:
        return self.E / self.p_z if self.p_z > 0 else math.inf


def bessel_beam(params: BesselBeamParams) -> FieldEvaluator:
    """Order-n Bessel beam evaluator; ``|psi|`` depends on rho only."""
    hbar = params.ctx.hbar
    kr, kz, w, n = params.k_rho, params.k_z, params.E / hbar, params.n

    def f(rho, z, t, phi):
        radial = bessel_j(n, rho * kr)
        return radial * np.exp(1j * (kz * z - w * t + n * phi))

    return FieldEvaluator(f, params.ctx.V, "bessel_beam",
                          {"E": params.E, "p_z": params.p_z, "n": n, "hbar": hbar,
                           "mass": params.ctx.mass}, phi_dependent=n > 0)


def slit_parameters(ctx: PhysicalContext, r: float, f: float, E: float):
    """Annular-slit/lens arithmetic: returns (p, p_rho, p_z).

    ``p = sqrt(2 m E)``, ``p_rho = (r/f) p`` and ``p_z = p sqrt(1 - r^2/f^2)``.
    """
    if not (0 <= r < f):
        raise GeometryError(f"slit radius must satisfy 0 <= r < f, got r={r!r}, f={f!r}")
    if E <= 0:
        raise DomainError("E must be > 0")
    p = math.sqrt(2 * ctx.mass * E)
    ratio = r / f
    return p, ratio * p, p * math.sqrt(1.0 - ratio * ratio)
