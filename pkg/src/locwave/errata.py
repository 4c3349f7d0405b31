"""Discrepancy ledger for the reference formulas, with evidence measured on demand.

Each entry names the formula by topic, says what the package implements
instead and reports numbers from the independent oracles, so the ledger
can never drift out of sync with the code.
"""
from __future__ import annotations

import numpy as np

from .core import PhysicalContext
from .exact import fourier_element, superposition_quadrature
from .finite_energy import WSpectrum, finite_energy_closed_form
from .numerics import integrate_semiinfinite
from .paraxial import (PHASE_SIGN, Family, ParaxialSpectrum, QFunction, _carrier, closed_form_value,
                       exact_integrand_quadrature, paraxial_invp_difference, paraxial_quadrature)
from .specfun import exp_integral_E1_complex


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / np.max(np.abs(b)))


def _phase_sign(ctx):
    sp = ParaxialSpectrum(Family.G1, 100.0)
    mV = ctx.mass * ctx.V
    rho = np.array([0.0, 5.0, 10.0, 20.0]) * ctx.hbar / mV
    zeta = np.array([0.0, 50.0, 200.0, -300.0]) * ctx.hbar / mV
    ex, _ = exact_integrand_quadrature(ctx, sp, rho, zeta)
    minus, _ = paraxial_quadrature(ctx, sp, rho, zeta, sign=-1)
    plus, _ = paraxial_quadrature(ctx, sp, rho, zeta, sign=+1)
    return {
        "topic": "paraxial-phase-sign",
        "summary": ("expanding the exact longitudinal phase gives exp(-i p^2 zeta/(2 hbar m V)); the reference "
                    "paraxial integral carries +i. The minus sign is shipped; Q is therefore the complex "
                    "conjugate of the reference Q, moduli unchanged."),
        "evidence": {"shipped_sign": PHASE_SIGN, "alpha": 100.0,
                     "rel_dev_from_exact_integral_sign_minus": _rel(minus, ex),
                     "rel_dev_from_exact_integral_sign_plus": _rel(plus, ex)},
    }


def _g1_exponent(ctx):
    sp = ParaxialSpectrum(Family.G1, 100.0)
    q, hb, mV = sp.q(ctx), ctx.hbar, ctx.mass * ctx.V
    rng = np.random.default_rng(1)
    rho = rng.uniform(0, 30, 12) * hb / mV
    zeta = rng.uniform(-400, 400, 12) * hb / mV
    quad, _ = paraxial_quadrature(ctx, sp, rho, zeta)
    ours = closed_form_value(ctx, sp, rho, zeta)
    Q = QFunction(ctx, q)(zeta)
    # reference exponent: the zeta term lacks the factor 1/2 present in Q
    reference_den = 4 * hb * (q * hb - PHASE_SIGN * 1j * zeta / mV)
    reference = 4 * q * hb * hb / (2 * Q) * np.exp(-rho**2 / reference_den) * _carrier(ctx, zeta)
    return {
        "topic": "g1-exponent",
        "summary": "gaussian-spectrum pulse: the transverse exponent is -rho^2/(4Q), not the reference form.",
        "evidence": {"rel_dev_corrected_vs_quadrature": _rel(ours, quad),
                     "rel_dev_reference_vs_quadrature": _rel(reference, quad)},
    }


def _invp(ctx):
    sp = ParaxialSpectrum(Family.INVP, 100.0)
    q, hb, mV = sp.q(ctx), ctx.hbar, ctx.mass * ctx.V
    r1, r2, zeta = 5.0 * hb / mV, 10.0 * hb / mV, 30.0 * hb / mV
    diff, _ = paraxial_invp_difference(ctx, sp, r1, r2, zeta)
    ours = closed_form_value(ctx, sp, r1, zeta) - closed_form_value(ctx, sp, r2, zeta)
    Q = QFunction(ctx, q)(zeta)
    u1, u2 = r1**2 / (4 * Q), r2**2 / (4 * Q)
    reference = 0.5 * (exp_integral_E1_complex(u1) - exp_integral_E1_complex(u2)) * _carrier(ctx, zeta)
    return {
        "topic": "invp-regularization",
        "summary": ("1/p spectrum: the defining integral diverges at every rho. Differences in rho carry an "
                    "extra ln(rho2/rho1) beyond the reference (1/2)E1 form; the shipped field is the "
                    "regularized entire form (1/2)[gamma - Ein(u) - ln(Q/(q hbar^2))]."),
        "evidence": {"quadrature_difference": complex(diff),
                     "regularized_difference": complex(ours),
                     "reference_E1_difference": complex(reference),
                     "abs_dev_regularized": abs(complex(ours) - complex(diff)),
                     "abs_dev_reference": abs(complex(reference) - complex(diff))},
    }


def _gamma_definition(ctx):
    e1 = float(exp_integral_E1_complex(1.0).real)
    quad = integrate_semiinfinite(lambda t: np.exp(-t) / t, 1.0, scale=1.0).value
    return {
        "topic": "incomplete-gamma-definition",
        "summary": ("the reference definitions of the incomplete gamma and probability integral are garbled; "
                    "gamma(0, z) is read as Gamma(0, z) = E1(z) and the probability integral as erf."),
        "evidence": {"E1(1)": e1, "quadrature of exp(-t)/t over [1, inf)": float(np.real(quad)),
                     "abs_dev": abs(e1 - float(np.real(quad)))},
    }


def _hbar_factors(ctx):
    c2 = PhysicalContext(2.0, ctx.mass, ctx.V, 0.0)
    mV = c2.mass * c2.V
    rho = np.array([0.0, 10.0, 25.0]) * c2.hbar / mV
    zeta = np.array([0.0, 60.0, -150.0]) * c2.hbar / mV
    out = {}
    for fam in (Family.I0MOD, Family.J0MOD):
        sp = ParaxialSpectrum(fam, 100.0, s=5.0)
        quad, _ = paraxial_quadrature(c2, sp, rho, zeta)
        ours = closed_form_value(c2, sp, rho, zeta)
        out[f"{fam.value}_rel_dev_at_hbar_2"] = _rel(ours, quad)
        out[f"{fam.value}_rel_dev_reference_prefactor_at_hbar_2"] = _rel(ours / c2.hbar, quad)
    return {
        "topic": "bessel-modulated-hbar-factors",
        "summary": ("Bessel-modulated spectra: the prefactor is q hbar^2/(2Q) and the spectral Bessel "
                    "argument is s p/hbar (dimensional consistency; identical at hbar = 1)."),
        "evidence": out,
    }


def _fourier_phase(ctx):
    k = ctx.kin
    n = 1
    mV = ctx.mass * ctx.V
    rho = np.array([0.0, 1.0, 3.0]) / mV * ctx.hbar
    z = np.array([0.5, -2.0, 4.0]) / mV * ctx.hbar
    t = np.array([0.0, 1.0, -0.5]) * ctx.hbar / (ctx.mass * ctx.V**2)
    S = lambda E: np.exp(2j * np.pi * n * np.asarray(E) / k.D)
    quad, _ = superposition_quadrature(ctx, S, rho, z, t)
    ours = fourier_element(ctx, n, 1.0)(rho, z, t)
    return {
        "topic": "fourier-phase-placement",
        "summary": ("single Fourier element: the constant phase exp(2 pi i n B/D) is placed as a per-element "
                    "factor; fixed by matching the direct Bessel-beam superposition."),
        "evidence": {"n": n, "rel_dev_vs_superposition": _rel(ours, quad)},
    }


def _finite_energy(ctx):
    ws = WSpectrum(1.5, 50.0, 0.5, 1.0)
    L = ctx.hbar / (ctx.mass * ctx.V)
    R, Z = np.meshgrid(np.array([0.0, 2.0, 5.0]) * L, np.array([-3.0, 0.0, 4.0]) * L, indexing="ij")
    _, report = finite_energy_closed_form(ctx, ws, R, Z, 0.0)
    return {
        "topic": "finite-energy-closed-form",
        "summary": ("the reference erfc closed form for the finite-energy pulse is dimensionally inconsistent "
                    "and does not reproduce the w-quadrature even after a best complex rescaling; the "
                    "quadrature is the shipped field and the closed form is reported only."),
        "evidence": report,
    }


def collect(ctx: PhysicalContext):
    if ctx.b != 0:
        ctx = ctx.with_b(0.0)
    return [f(ctx) for f in (_phase_sign, _g1_exponent, _invp, _gamma_definition, _hbar_factors,
                             _fourier_phase, _finite_energy)]
