"""Paraxial localized pulses on the line E = V p_z.

The paraxial field is

    Psi(rho, zeta) = N exp(2i mV zeta/hbar)
                     * int_0^inf dp J0(rho p/hbar) S(p) exp(i s p^2 zeta / (2 hbar m V))

with ``s = PHASE_SIGN``.  Expanding the exact phase
``mV zeta sqrt(1 - p^2/m^2V^2)/hbar`` to first order gives ``s = -1``; the
test suite re-derives the sign by comparing with the exact integrand.

Four spectra have closed forms, all written with

    Q(zeta) = hbar (q hbar - s i zeta / (2 m V)),   q = alpha / (m V)^2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import PhysicalContext
from .numerics import (ComplexAmplitude, FieldEvaluator, QuadratureSpec, integrate_complex,
                       integrate_semiinfinite)
from .specfun import (EULER_GAMMA, bessel_j, bessel_j0_complex, ein_complex, exp_integral_E1_complex,
                      mod_bessel_i0_complex)

PHASE_SIGN = -1


class Family(str, enum.Enum):
    G1 = "g1"
    INVP = "invp"
    I0MOD = "i0mod"
    J0MOD = "j0mod"
    CUSTOM = "custom"


class MeasurementError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ParaxialSpectrum:
    family: Family
    alpha: float
    s: float = 0.0
    func: Callable | None = None   # CUSTOM only: S(p) for an array of p
    quality_flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.s < 0:
            raise ValueError("s must be >= 0")
        if fam is Family.CUSTOM and self.func is None:
            raise ValueError("CUSTOM spectrum needs func")
        flags = ("alpha<10: paraxial condition alpha >> 1 weakly satisfied",) if self.alpha < 10 else ()
        object.__setattr__(self, "quality_flags", flags)

    def q(self, ctx: PhysicalContext) -> float:
        return self.alpha / (ctx.mass * ctx.V) ** 2

    def weight(self, ctx: PhysicalContext, p):
        """S(p) as a numpy array."""
        p = np.asarray(p, dtype=float)
        q = self.q(ctx)
        g = np.exp(-q * p * p)
        fam = self.family
        if fam is Family.G1:
            return 4 * q * p * g
        if fam is Family.INVP:
            return g / p
        if fam is Family.I0MOD:
            x = self.s * p / ctx.hbar
            # I0(x) < e^x: where q p^2 - x > 745 the product has underflowed to 0
            # even if I0 alone would overflow
            dead = q * p * p - x > 745.0
            i0 = mod_bessel_i0_complex(np.where(dead, 0.0, x)).real
            return np.where(dead, 0.0, q * p * g * i0)
        if fam is Family.J0MOD:
            return q * p * g * bessel_j(0, self.s * p / ctx.hbar)
        return np.asarray(self.func(p))


@dataclass(frozen=True)
class QFunction:
    """Q = hbar (q hbar - s i zeta/(2 m V)); Re Q = q hbar^2 > 0."""
    ctx: PhysicalContext
    q: float

    def __call__(self, zeta):
        c = self.ctx
        return c.hbar * (self.q * c.hbar - PHASE_SIGN * 1j * np.asarray(zeta) / (2 * c.mass * c.V))


def _carrier(ctx, zeta):
    return np.exp(2j * ctx.mass * ctx.V * zeta / ctx.hbar)


def closed_form_value(ctx: PhysicalContext, spectrum: ParaxialSpectrum, rho, zeta):
    """Closed-form integral (without N)."""
    rho = np.asarray(rho, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    rho, zeta = np.broadcast_arrays(rho, zeta)
    q = spectrum.q(ctx)
    hb = ctx.hbar
    Q = QFunction(ctx, q)(zeta)
    fam = spectrum.family
    if fam is Family.G1:
        val = 4 * q * hb * hb / (2 * Q) * np.exp(-rho**2 / (4 * Q))
    elif fam is Family.INVP:
        # the 1/p integral diverges by a rho-independent constant; fixing it as
        # -(1/2)[E1(u) + ln(rho^2 / (4 q hbar^2))] leaves an entire function of u
        u = rho**2 / (4 * Q)
        val = 0.5 * (EULER_GAMMA - ein_complex(u) - np.log(Q / (q * hb * hb)))
    elif fam is Family.I0MOD:
        s = spectrum.s
        val = (q * hb * hb / (2 * Q) * np.exp((s * s - rho**2) / (4 * Q))
               * bessel_j0_complex(s * rho / (2 * Q)))
    elif fam is Family.J0MOD:
        s = spectrum.s
        val = (q * hb * hb / (2 * Q) * np.exp(-(s * s + rho**2) / (4 * Q))
               * mod_bessel_i0_complex(s * rho / (2 * Q)))
    else:
        raise ValueError("CUSTOM spectra have no closed form; use paraxial_quadrature")
    return val * _carrier(ctx, zeta)


def paraxial_closed_form(ctx: PhysicalContext, spectrum: ParaxialSpectrum, N=None) -> FieldEvaluator:
    """Closed-form paraxial pulse.

    ``N=None`` peak-normalizes |Psi|^2 to 1 (analytically for G1, numerically
    for I0MOD/J0MOD).  INVP is defined only up to an additive constant times
    the carrier, so it keeps N = 1.
    """
    if spectrum.family is Family.CUSTOM:
        raise ValueError("CUSTOM spectra have no closed form; use paraxial_quadrature")
    if N is None:
        if spectrum.family is Family.G1:
            N = 0.5
        elif spectrum.family is Family.INVP:
            N = 1.0
        else:
            N = 1.0 / math.sqrt(_numeric_peak(lambda r, z: closed_form_value(ctx, spectrum, r, z), ctx, spectrum))
    V = ctx.V

    def f(rho, z, t, phi):
        return N * closed_form_value(ctx, spectrum, rho, z - V * t)

    params = {"family": spectrum.family.value, "alpha": spectrum.alpha, "s": spectrum.s, "N": N,
              "phase_sign": PHASE_SIGN, "quality_flags": list(spectrum.quality_flags)}
    return FieldEvaluator(f, V, "paraxial", params)


def _numeric_peak(func, ctx, spectrum):
    """max |func|^2 by a coarse grid search followed by local refinement."""
    from scipy.optimize import minimize

    q = spectrum.q(ctx)
    hb = ctx.hbar
    d_rho = hb * math.sqrt(2 * q) + spectrum.s
    d_zeta = 4 * ctx.mass * ctx.V * q * hb
    r = np.linspace(0, 4 * d_rho, 81)
    z = np.linspace(-d_zeta, d_zeta, 81)
    R, Z = np.meshgrid(r, z, indexing="ij")
    I = np.abs(func(R, Z)) ** 2
    i, j = np.unravel_index(np.argmax(I), I.shape)
    x0 = np.array([R[i, j] / d_rho, Z[i, j] / d_zeta])
    res = minimize(lambda x: -abs(complex(func(abs(x[0]) * d_rho, x[1] * d_zeta))) ** 2, x0,
                   method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
    return max(-res.fun, I[i, j])


def invp_log_form(ctx: PhysicalContext, spectrum: ParaxialSpectrum, N: float = 1.0) -> FieldEvaluator:
    """The bare form (1/2) E1(rho^2/(4Q)) times the carrier.

    It solves the equation off the axis but differs from the 1/p integral by
    a ln(rho) term; on the axis it returns ``inf`` (see :func:`paraxial_value`).
    Kept for comparison only.
    """
    q = spectrum.q(ctx)
    V = ctx.V

    def f(rho, z, t, phi):
        rho, zeta = np.broadcast_arrays(rho, z - V * t)
        Q = QFunction(ctx, q)(zeta)
        val = np.zeros(rho.shape, dtype=complex)
        ok = rho > 0
        if ok.any():
            val[ok] = 0.5 * exp_integral_E1_complex(rho[ok] ** 2 / (4 * Q[ok]))
        val = np.asarray(N * val * _carrier(ctx, zeta))
        return np.where(ok, val, np.inf + 0j)

    return FieldEvaluator(f, V, "paraxial_invp_log", {"alpha": spectrum.alpha, "N": N})


def paraxial_value(evaluator: FieldEvaluator, rho, z, t) -> ComplexAmplitude:
    v = complex(evaluator(rho, z, t))
    return ComplexAmplitude(v, float(rho), float(z), float(t), divergent=not np.isfinite(v))


def paraxial_quadrature(ctx: PhysicalContext, spectrum: ParaxialSpectrum, rho, zeta, N: float = 1.0,
                        spec: QuadratureSpec | None = None, sign: int | None = None):
    """Direct quadrature of the paraxial integral over p in [0, inf).

    ``rho`` and ``zeta`` broadcast; returns (values, QuadResult).  ``sign``
    overrides PHASE_SIGN (used to test the sign choice).
    """
    sg = PHASE_SIGN if sign is None else sign
    rho, zeta = np.broadcast_arrays(np.asarray(rho, float), np.asarray(zeta, float))
    r, zt = rho.ravel(), zeta.ravel()
    hb, mV = ctx.hbar, ctx.mass * ctx.V
    q = spectrum.q(ctx)

    def f(p):
        S = spectrum.weight(ctx, p)[:, None]
        ph = np.exp(1j * sg * (p * p)[:, None] * zt[None, :] / (2 * hb * mV))
        return bessel_j(0, p[:, None] * r[None, :] / hb) * S * ph

    res = integrate_semiinfinite(f, 0.0, spec, scale=1.0 / math.sqrt(q))
    vals = N * np.asarray(res.value).reshape(rho.shape) * _carrier(ctx, zeta)
    return vals, res


def paraxial_invp_difference(ctx: PhysicalContext, spectrum: ParaxialSpectrum, rho1, rho2, zeta,
                             spec: QuadratureSpec | None = None):
    """Psi(rho1) - Psi(rho2) for the 1/p spectrum from the regularized integral."""
    hb, mV = ctx.hbar, ctx.mass * ctx.V
    q = spectrum.q(ctx)
    zeta = float(zeta)

    def f(p):
        w = np.exp(-q * p * p + 1j * PHASE_SIGN * p * p * zeta / (2 * hb * mV))
        with np.errstate(invalid="ignore", divide="ignore"):
            d = (bessel_j(0, rho1 * p / hb) - bessel_j(0, rho2 * p / hb)) / p
        return d * w

    res = integrate_semiinfinite(f, 0.0, spec, scale=1.0 / math.sqrt(q))
    return res.value * _carrier(ctx, zeta), res


def exact_integrand_quadrature(ctx: PhysicalContext, spectrum: ParaxialSpectrum, rho, zeta,
                               N: float = 1.0, spec: QuadratureSpec | None = None):
    """Non-paraxial reference over p in [0, mV] with the exact square-root phase."""
    rho, zeta = np.broadcast_arrays(np.asarray(rho, float), np.asarray(zeta, float))
    r, zt = rho.ravel(), zeta.ravel()
    hb, mV = ctx.hbar, ctx.mass * ctx.V

    def f(p):
        x2 = (p / mV) ** 2
        # mV (sqrt(1 - x^2) - 1) written without cancellation
        dphase = -mV * x2 / (1.0 + np.sqrt(np.clip(1.0 - x2, 0.0, None)))
        S = spectrum.weight(ctx, p)[:, None]
        ph = np.exp(1j * dphase[:, None] * zt[None, :] / hb)
        return bessel_j(0, p[:, None] * r[None, :] / hb) * S * ph

    # the spectrum is concentrated below a few / sqrt(q); split there
    bp = [min(k / math.sqrt(spectrum.q(ctx)), mV) for k in (1.0, 3.0, 8.0)]
    res = integrate_complex(f, 0.0, mV, spec, breakpoints=bp)
    vals = N * np.asarray(res.value).reshape(rho.shape) * _carrier(ctx, zeta)
    return vals, res


def _bisect_level(g, level, lo, hi, tol):
    """Find x in [lo, hi] with g(x) = level for decreasing g."""
    glo = g(lo)
    while g(hi) > level:
        hi *= 2
        if hi > 1e12 * max(1.0, abs(lo) + 1):
            raise MeasurementError("intensity never drops below the requested level")
    xs = np.linspace(lo, hi, 65)
    vals = np.array([g(x) for x in xs])
    if np.any(np.diff(vals) > 1e-12 * glo):
        raise MeasurementError("profile is not monotone on the measurement interval")
    k = int(np.argmax(vals <= level))
    a, b = xs[k - 1], xs[k]
    while b - a > tol * max(1.0, abs(b)):
        c = 0.5 * (a + b)
        if g(c) > level:
            a = c
        else:
            b = c
    return 0.5 * (a + b)


def width_measurements(evaluator: FieldEvaluator, ctx: PhysicalContext, rho_guess: float | None = None,
                       zeta_guess: float | None = None, tol: float = 1e-10):
    """Measured (1/e half-width in rho at zeta=0, 1/e^2 half-width in zeta on axis)."""
    I0 = abs(complex(evaluator.comoving(0.0, 0.0))) ** 2
    if not (np.isfinite(I0) and I0 > 0):
        raise MeasurementError("field is not peaked at a finite value at the origin")
    hb = ctx.hbar
    rg = rho_guess or hb / (ctx.mass * ctx.V)
    zg = zeta_guess or hb / (ctx.mass * ctx.V)
    d_rho = _bisect_level(lambda r: abs(complex(evaluator.comoving(r, 0.0))) ** 2 / I0,
                          math.exp(-1), 0.0, rg, tol)
    d_zeta = _bisect_level(lambda z: abs(complex(evaluator.comoving(0.0, z))) ** 2 / I0,
                           math.exp(-2), 0.0, zg, tol)
    return d_rho, d_zeta


def predicted_widths(ctx: PhysicalContext, alpha: float):
    """Analytic G1 widths: hbar sqrt(2 alpha)/(mV) and sqrt(e^2-1) 2 alpha hbar/(mV)."""
    mV = ctx.mass * ctx.V
    return ctx.hbar * math.sqrt(2 * alpha) / mV, math.sqrt(math.e**2 - 1) * 2 * alpha * ctx.hbar / mV
