import math

import numpy as np
import pytest

from locwave import finite_energy as fe
from locwave.numerics import integrate_semiinfinite
from locwave.verify import rigid_translation_check

WS = fe.WSpectrum(1.5, 50.0, 0.5, 1.0)


def test_validation(ctx):
    for bad in (fe.WSpectrum(1.0, 50.0), fe.WSpectrum(1.5, 0.0), fe.WSpectrum(1.5, 50.0, a=-1.0)):
        with pytest.raises(ValueError):
            bad.validate(ctx)


def test_two_rules_agree_at_origin(ctx):
    v, res = fe.finite_energy_quadrature(ctx, WS, 0.0, 0.0, 0.0)
    g = fe.finite_energy_gauss_legendre(ctx, WS, 0.0, 0.0, 0.0)
    assert res.converged
    assert abs(complex(v) - complex(g)) < 1e-8 * abs(complex(v))
    # self-golden value, recorded from both rules
    assert complex(v) == pytest.approx(1.0369603167603438, rel=1e-10)


def test_two_rules_agree_off_axis(ctx, rng):
    R, Z, T = rng.uniform(0, 20, 50), rng.uniform(-20, 20, 50), rng.uniform(-3, 3, 50)
    v, _ = fe.finite_energy_quadrature(ctx, WS, R, Z, T)
    g = fe.finite_energy_gauss_legendre(ctx, WS, R, Z, T)
    assert np.max(np.abs(v - g)) < 1e-8 * np.max(np.abs(v))


def test_delta_limit(ctx):
    w0 = 1.5
    ws = fe.WSpectrum(w0, 1e4 / w0**2, 0.5, 1.0)
    v, _ = fe.finite_energy_quadrature(ctx, ws, 0.0, 0.0, 0.0)
    total = integrate_semiinfinite(lambda w: ws.weight(ctx, w), ctx.mass * ctx.V,
                                   scale=w0 - 1.0 + 1 / math.sqrt(ws.q_w)).value
    ref = fe.psi_w(ctx, ws, w0, 0.0, 0.0, 0.0) * total
    assert abs(complex(v) - complex(ref)) < 1e-2 * abs(complex(v))


def test_zero_spectrum(ctx):
    ws = fe.WSpectrum(1.5, 50.0, 0.5, 1.0, amplitude=0.0)
    v, _ = fe.finite_energy_quadrature(ctx, ws, np.linspace(0, 3, 4), 0.0, 0.0)
    assert np.all(v == 0)


def test_psi_w_matches_mackinnon(ctx):
    from locwave.exact import mackinnon_solution
    w = 1.3
    c = ctx.with_b((w * w - 1.0) / 2)
    r, z, t = np.array([0.0, 1.0, 2.5]), np.array([0.3, -1.0, 2.0]), np.array([0.0, 0.7, -1.1])
    ref = mackinnon_solution(c, 0.5)(r, z, t)
    assert np.allclose(fe.psi_w(ctx, WS, w, r, z, t), ref, rtol=1e-13, atol=0)


def test_field_is_peak_normalized(ctx):
    ev = fe.finite_energy_field(ctx, WS)
    assert abs(ev(0.0, 0.0, 0.0)) == pytest.approx(1.0, rel=1e-13)


def test_closed_form_report(ctx):
    L = ctx.hbar / (ctx.mass * ctx.V)
    R, Z = np.meshgrid(np.array([0.0, 2.0, 5.0]) * L, np.array([-3.0, 0.0, 4.0]) * L, indexing="ij")
    closed, rep = fe.finite_energy_closed_form(ctx, WS, R, Z, 0.0)
    assert closed.shape == (3, 3)
    assert rep["n_points"] == 9
    assert rep["status"] == "unvalidated"
    assert rep["max_rel_deviation"] > rep["threshold"]
    assert rep["max_rel_deviation_after_scale"] <= rep["max_rel_deviation"]


def test_closed_form_removable_singularity(ctx):
    a = fe.closed_form_values(ctx, WS, 0.0, 0.0, 0.0)
    b = fe.closed_form_values(ctx, WS, 1e-7, 0.0, 0.0)
    assert np.isfinite(a) and abs(a - b) <= 1e-6 * abs(a)


def test_depth_grows_like_sqrt_q(ctx):
    d = [fe.depth_of_field(ctx, fe.WSpectrum(1.5, q, 0.5, 1.0)) for q in (12.5, 50.0, 200.0)]
    assert d[0] < d[1] < d[2]
    assert d[1] / d[0] == pytest.approx(2.0, rel=0.05)
    assert d[2] / d[1] == pytest.approx(2.0, rel=0.05)
    I = fe.on_axis_intensity(ctx, WS, np.array([0.0, d[1]]))
    assert I[1] / I[0] == pytest.approx(fe.DEPTH_LEVEL, rel=1e-4)


def test_norm_tail_beyond_normalized_box(ctx):
    # rho' = 50, |zeta'| = 200 with sqrt(P) = hbar = 1
    inner = fe.norm_integral(ctx, WS, 25.0, 100.0, n_rho=10, n_zeta=30)
    outer = fe.norm_integral(ctx, WS, 50.0, 200.0, n_rho=20, n_zeta=60)
    assert abs(outer - inner) / outer < 1e-2


def test_norm_zero_width(ctx):
    with pytest.raises(fe.IntegrationDomainError):
        fe.norm_integral(ctx, WS, 0.0, 10.0)


def test_translation_error_shrinks_with_q(ctx, rng):
    probes = np.column_stack([rng.uniform(0, 3, 40), rng.uniform(-3, 3, 40),
                              np.zeros(40), rng.uniform(1, 3, 40)])
    errs = [rigid_translation_check(fe.finite_energy_field(ctx, fe.WSpectrum(1.5, q, 0.5, 1.0)), ctx.V, probes)
            for q in (12.5, 50.0, 200.0, 800.0)]
    assert errs[1] > 1e-6
    assert all(a > b for a, b in zip(errs, errs[1:]))
