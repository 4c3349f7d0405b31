"""Exact localized solutions on the line E = V p_z + b.

A superposition of Bessel beams over E in [E-, E+],

    Psi = N exp(-i b z/(hbar V)) int dE J0(rho p_rho(E)/hbar) S(E) exp(i E zeta/(hbar V)),

becomes, with E = A u + B,

    Psi = N A exp(i m V eta/hbar) int_{-1}^{1} du S(u) J0(beta sqrt(1-u^2)) exp(i gamma u)

where beta = sqrt(P) rho/hbar and gamma = A zeta/(hbar V).  The identity
``int J0(beta sqrt(1-u^2)) exp(i c u) du = 2 sinc(sqrt(c^2 + beta^2))`` gives
the sinc-shaped closed forms below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .core import PhysicalContext, comoving
from .numerics import FieldEvaluator, QuadratureSpec, integrate_complex
from .specfun import bessel_j, csinc


@dataclass(frozen=True)
class FourierElement:
    n: int
    a_n: complex


@dataclass(frozen=True)
class RealExp:
    """S(E) = s0 exp(a (E - E+)), a >= 0."""
    a: float
    s0: float = 1.0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("a must be >= 0")

    def as_function(self, ctx: PhysicalContext):
        Ep = ctx.kin.E_plus
        return lambda E: self.s0 * np.exp(self.a * (np.asarray(E, dtype=float) - Ep))


@dataclass(frozen=True)
class FourierSeries:
    """Truncated coefficients a_n for n = n_min .. n_min + len(coeffs) - 1."""
    coeffs: tuple
    n_min: int

    @property
    def n_trunc(self):
        return (len(self.coeffs) - 1) // 2

    def spectrum(self, ctx: PhysicalContext, E):
        D = ctx.kin.D
        E = np.asarray(E, dtype=float)
        out = np.zeros(E.shape, dtype=complex)
        for i, c in enumerate(self.coeffs):
            out += c * np.exp(2j * np.pi * (self.n_min + i) * E / D)
        return out


def _eta_phase(ctx, z, t):
    c = comoving(ctx, 0.0, z, t)
    return np.exp(1j * ctx.mass * ctx.V * c.eta / ctx.hbar), c.zeta


def z_argument(ctx: PhysicalContext, n: int, rho, zeta):
    """Z = sqrt((A zeta/(hbar V) + n pi)^2 + P rho^2/hbar^2) (real, >= 0)."""
    k = ctx.kin
    g = k.A * np.asarray(zeta, dtype=float) / (ctx.hbar * ctx.V) + n * np.pi
    return np.sqrt(g * g + k.P * np.asarray(rho, dtype=float) ** 2 / ctx.hbar**2)


def y_argument(ctx: PhysicalContext, a: float, rho, zeta):
    """Y = (sqrt(P)/hbar) sqrt(rho^2 - (hbar a V + i zeta)^2), principal branch.

    numpy's principal sqrt gives Im Y >= 0 on the negative real radicand
    axis; csinc is even so the branch never changes the field.
    """
    k = ctx.kin
    rad = np.asarray(rho, dtype=float) ** 2 - (ctx.hbar * a * ctx.V + 1j * np.asarray(zeta, dtype=float)) ** 2
    return k.sqrtP / ctx.hbar * np.sqrt(rad.astype(complex))


def damped_sinc(Y, d):
    """exp(-d) sin(Y)/Y without overflow when |Im Y| <= d (d >= 0 real)."""
    Y = np.asarray(Y, dtype=complex)
    d = np.asarray(d, dtype=float)
    small = np.abs(Y) < 1e-4
    Ys = np.where(small, 1.0, Y)
    big = (np.exp(1j * Ys - d) - np.exp(-1j * Ys - d)) / (2j * Ys)
    return np.where(small, np.exp(-d) * csinc(np.where(small, Y, 0.0)), big)


def fourier_element(ctx: PhysicalContext, n: int, a_n: complex, N: float = 1.0) -> FieldEvaluator:
    """N a_n 2A sinc(Z) exp(i m V eta/hbar) exp(2 pi i n B/D)."""
    k = ctx.kin
    pref = N * a_n * 2 * k.A * np.exp(2j * np.pi * n * k.B / k.D)

    def f(rho, z, t, phi):
        ph, zeta = _eta_phase(ctx, z, t)
        return pref * kernels.csinc(z_argument(ctx, n, rho, zeta).astype(complex)) * ph

    return FieldEvaluator(f, ctx.V, "fourier_element", {"n": n, "a_n": complex(a_n), "N": N})


def mackinnon_solution(ctx: PhysicalContext, a: float, s0: float = 1.0, N: float = 1.0) -> FieldEvaluator:
    """N s0 2 V sqrt(P) exp(i m V eta/hbar) exp(-a V sqrt(P)) sinc(Y)."""
    if a < 0:
        raise ValueError("a must be >= 0")
    k = ctx.kin
    pref = N * s0 * 2 * ctx.V * k.sqrtP
    damp = a * ctx.V * k.sqrtP

    def f(rho, z, t, phi):
        ph, zeta = _eta_phase(ctx, z, t)
        return pref * damped_sinc(y_argument(ctx, a, rho, zeta), damp) * ph

    return FieldEvaluator(f, ctx.V, "mackinnon", {"a": a, "s0": s0, "N": N})


def fourier_coefficients(ctx: PhysicalContext, S: Callable, n_trunc: int,
                         spec: QuadratureSpec | None = None) -> FourierSeries:
    """a_n = (1/D) int_{E-}^{E+} S(E) exp(-2 pi i n E/D) dE for |n| <= n_trunc.

    All coefficients come from one vector-valued quadrature; the result
    carries the per-coefficient error estimates as ``.errors``.
    """
    if n_trunc < 0:
        raise ValueError("n_trunc must be >= 0")
    k = ctx.kin
    ns = np.arange(-n_trunc, n_trunc + 1)

    def f(E):
        return np.asarray(S(E))[:, None] * np.exp(-2j * np.pi * E[:, None] * ns[None, :] / k.D)

    res = integrate_complex(f, k.E_minus, k.E_plus, spec)
    fs = FourierSeries(coeffs=tuple(complex(c) for c in np.asarray(res.value) / k.D), n_min=-n_trunc)
    object.__setattr__(fs, "errors", np.asarray(res.error) / k.D)
    object.__setattr__(fs, "converged", res.converged)
    return fs


def general_solution(ctx: PhysicalContext, series: FourierSeries, N: float = 1.0) -> FieldEvaluator:
    """N 2A exp(i m V eta/hbar) sum_n a_n exp(2 pi i n B/D) sinc(Z_n)."""
    k = ctx.kin
    ns = series.n_min + np.arange(len(series.coeffs))
    c = np.asarray(series.coeffs, dtype=complex) * np.exp(2j * np.pi * ns * k.B / k.D)
    scale = k.A / (ctx.hbar * ctx.V)

    def f(rho, z, t, phi):
        ph, zeta = _eta_phase(ctx, z, t)
        gamma = scale * np.asarray(zeta, dtype=float)
        beta2 = k.P * np.asarray(rho, dtype=float) ** 2 / ctx.hbar**2
        return N * 2 * k.A * kernels.sinc_series(gamma, beta2, c, series.n_min) * ph

    return FieldEvaluator(f, ctx.V, "fourier_series",
                          {"n_min": series.n_min, "coeffs": [complex(x) for x in series.coeffs], "N": N})


def superposition_quadrature(ctx: PhysicalContext, S: Callable, rho, z, t, N: float = 1.0,
                             spec: QuadratureSpec | None = None):
    """Direct u-space quadrature of the Bessel-beam superposition.

    Each beam's phase exp(i (p_z z - E t)/hbar) is formed from its own (E, p_z)
    so the result does not rely on the eta/zeta rewriting.  ``S`` takes an
    array of energies.  Returns (values, QuadResult).
    """
    k = ctx.kin
    rho, z, t = np.broadcast_arrays(np.asarray(rho, float), np.asarray(z, float), np.asarray(t, float))
    r, zz, tt = rho.ravel(), z.ravel(), t.ravel()
    hb = ctx.hbar

    def f(u):
        E = k.A * u + k.B
        p_rho = k.sqrtP * np.sqrt(np.clip(1.0 - u * u, 0.0, None))
        p_z = (E - ctx.b) / ctx.V
        ph = np.exp(1j * (p_z[:, None] * zz[None, :] - E[:, None] * tt[None, :]) / hb)
        return bessel_j(0, p_rho[:, None] * r[None, :] / hb) * np.asarray(S(E))[:, None] * ph

    res = integrate_complex(f, -1.0, 1.0, spec)
    vals = N * k.A * np.asarray(res.value).reshape(rho.shape)
    return vals, res


def gaussian_energy_spectrum(ctx: PhysicalContext, center: float | None = None, sigma: float | None = None):
    """Gaussian S(E) centred at B with width D/10 by default."""
    k = ctx.kin
    c = k.B if center is None else center
    s = k.D / 10 if sigma is None else sigma
    return lambda E: np.exp(-0.5 * ((np.asarray(E, dtype=float) - c) / s) ** 2)


def normalized_coords(ctx: PhysicalContext, rho_p, zeta_p):
    """Map rho' = sqrt(P) rho/hbar, zeta' = sqrt(P) zeta/hbar back to (rho, zeta)."""
    s = ctx.hbar / ctx.kin.sqrtP
    return np.asarray(rho_p) * s, np.asarray(zeta_p) * s


def a_bar_to_a(ctx: PhysicalContext, a_bar: float) -> float:
    """Invert A_bar = a sqrt(P) V (equal to m a V^2 when b = 0)."""
    return a_bar / (ctx.kin.sqrtP * ctx.V)


def normalized_profile(evaluator: FieldEvaluator, ctx: PhysicalContext, rho_p, zeta_p):
    """|Psi|^2 and (Re Psi)^2 at t = 0 on the (rho', zeta') lattice.

    Returns a dict with the axes and both arrays, shape (len(rho_p), len(zeta_p)).
    """
    rho_p = np.asarray(rho_p, dtype=float)
    zeta_p = np.asarray(zeta_p, dtype=float)
    R, Zp = np.meshgrid(rho_p, zeta_p, indexing="ij")
    rho, zeta = normalized_coords(ctx, R, Zp)
    psi = evaluator(rho, zeta, np.zeros_like(zeta))
    return {"rho_p": rho_p, "zeta_p": zeta_p, "abs2": np.abs(psi) ** 2, "re2": psi.real**2}


def x_arm_contrast(evaluator: FieldEvaluator, ctx: PhysicalContext, radii, off_slope: float = 1 / math.sqrt(2)):
    """Mean ratio of |Psi|^2 on the diagonal rho' = |zeta'| to |Psi|^2 on the
    ray rho' = off_slope * zeta' at the same distance from the origin.

    Both zeta' > 0 and zeta' < 0 halves are averaged.
    """
    radii = np.asarray(radii, dtype=float)
    th_d = math.pi / 4
    th_o = math.atan(off_slope)
    vals = []
    for sgn in (1.0, -1.0):
        rd, zd = normalized_coords(ctx, radii * math.sin(th_d), sgn * radii * math.cos(th_d))
        ro, zo = normalized_coords(ctx, radii * math.sin(th_o), sgn * radii * math.cos(th_o))
        Id = np.abs(evaluator(rd, zd, 0.0)) ** 2
        Io = np.abs(evaluator(ro, zo, 0.0)) ** 2
        vals.append(Id / Io)
    return float(np.mean(vals))
