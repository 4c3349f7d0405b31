"""Physical parameters, spectral-line kinematics and co-moving coordinates.

Every solution family in the package is parameterised by a
:class:`PhysicalContext` (hbar, mass, peak speed ``V`` and the energy offset
``b`` of the straight line ``E = V p_z + b`` in the (p_z, E) plane).  The
derived constants live in :class:`KinematicConstants`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the physically admissible region."""


@dataclass(frozen=True)
class PhysicalContext:
    hbar: float = 1.0
    mass: float = 1.0
    V: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        for name in ("hbar", "mass", "V"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be finite and > 0, got {val!r}")
        if not (math.isfinite(self.b) and self.b >= 0):
            raise DomainError(f"b must be finite and >= 0, got {self.b!r}")

    @cached_property
    def kin(self) -> "KinematicConstants":
        return kinematics(self)

    def with_b(self, b: float) -> "PhysicalContext":
        return PhysicalContext(self.hbar, self.mass, self.V, b)


@dataclass(frozen=True)
class KinematicConstants:
    A: float
    B: float
    P: float
    D: float
    E_minus: float
    E_plus: float
    v_phase_b: float

    @property
    def sqrtP(self) -> float:
        return math.sqrt(self.P)


def kinematics(ctx: PhysicalContext) -> KinematicConstants:
    m, V, b = ctx.mass, ctx.V, ctx.b
    mV2 = m * V * V
    P = m * m * V * V + 2.0 * m * b
    A = math.sqrt(P) * V
    B = mV2 + b
    # E_pm = mV^2 (1 +- sqrt(1 + 2b/mV^2)) + b, written as B +- A; the
    # lower root is formed as b^2 / E_plus to avoid cancellation.
    E_plus = B + A
    E_minus = b * b / E_plus
    return KinematicConstants(
        A=A, B=B, P=P, D=2.0 * A, E_minus=E_minus, E_plus=E_plus, v_phase_b=V + b / (m * V)
    )


def _check_energy(ctx: PhysicalContext, E, slack: float = 1e-12):
    k = ctx.kin
    E = np.asarray(E, dtype=float)
    tol = slack * k.E_plus
    if np.any(E < k.E_minus - tol) or np.any(E > k.E_plus + tol):
        raise DomainError(
            f"energy outside the allowed interval [E-, E+] = [{k.E_minus:.12g}, {k.E_plus:.12g}]"
        )
    return E


def p_z_of_E(ctx: PhysicalContext, E):
    """Longitudinal momentum on the line E = V p_z + b."""
    p_z = (np.asarray(E, dtype=float) - ctx.b) / ctx.V
    if np.any(p_z < -1e-12 * ctx.mass * ctx.V):
        raise DomainError("p_z >= 0 violated: only forward-travelling components are allowed")
    return p_z


def p_rho_of_E(ctx: PhysicalContext, E):
    """Transverse momentum for an energy on the spectral line.

    ``p_rho = sqrt(-E^2 + (2 m V^2 + 2b) E - b^2) / V`` which vanishes at both
    ends of ``[E-, E+]`` and peaks at ``E = B`` with value ``sqrt(P)``.
    """
    E = _check_energy(ctx, E)
    k = ctx.kin
    # factored form (E+ - E)(E - E-) is better conditioned near the roots
    rad = (k.E_plus - E) * (E - k.E_minus)
    out = np.sqrt(np.clip(rad, 0.0, None)) / ctx.V
    return float(out) if out.ndim == 0 else out


def u_of_E(ctx: PhysicalContext, E):
    E = _check_energy(ctx, E)
    k = ctx.kin
    u = np.clip((E - k.B) / k.A, -1.0, 1.0)
    # the interval ends map to u = -1 and u = +1 exactly
    u = np.where(E >= k.E_plus, 1.0, np.where(E <= k.E_minus, -1.0, u))
    return float(u) if u.ndim == 0 else u


def E_of_u(ctx: PhysicalContext, u):
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0 + 1e-12):
        raise DomainError("u must lie in [-1, 1]")
    k = ctx.kin
    E = k.A * u + k.B
    return float(E) if E.ndim == 0 else E


@dataclass(frozen=True)
class ComovingCoords:
    zeta: float
    eta: float
    rho: float
    phi: float = 0.0


def comoving(ctx: PhysicalContext, rho, z, t, phi=0.0) -> ComovingCoords:
    """zeta = z - V t and eta = z - v t with v = V + b/(mV)."""
    zeta = np.asarray(z) - ctx.V * np.asarray(t)
    eta = np.asarray(z) - ctx.kin.v_phase_b * np.asarray(t)
    return ComovingCoords(zeta=zeta, eta=eta, rho=np.asarray(rho), phi=phi)
