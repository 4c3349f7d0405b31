import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from locwave.core import DomainError, PhysicalContext
from locwave.numerics import GridSpec
from locwave import potential as pt
from locwave.verify import rigid_translation_check, schrodinger_residual


@pytest.fixture
def guide(ctx):
    return pt.HarmonicGuide(ctx, 0.05)


def test_five_modes(guide):
    modes = pt.solve_modes(guide)
    assert [m.n for m in modes] == [0, 1, 2, 3, 4]
    assert [m.Lambda_sq for m in modes] == pytest.approx([0.1, 0.3, 0.5, 0.7, 0.9], rel=1e-14)


def test_ground_mode_roots(guide):
    p, q = pt.solve_modes(guide, fd_check=False)[0].p_z_pair
    assert p == pytest.approx(1 + math.sqrt(0.9), abs=1e-12)
    assert q == pytest.approx(1 - math.sqrt(0.9), abs=1e-12)


def test_no_modes(ctx):
    with pytest.raises(pt.NoAdmissibleModes) as e:
        pt.solve_modes(pt.HarmonicGuide(ctx, 0.6))
    assert e.value.threshold == pytest.approx(0.5)


def test_bad_omega(ctx):
    with pytest.raises(DomainError):
        pt.HarmonicGuide(ctx, 0.0)


def test_fd_eigenvalues(guide):
    fd = pt.fd_radial_eigenvalues(guide.U, 12 * guide.length * math.sqrt(5), 4000, 1.0, 1.0, 5)
    assert np.max(np.abs(fd - [guide.lambda_sq(n) for n in range(5)])) < 1e-4
    # tabulated potential gives the same
    h = 12 * guide.length * math.sqrt(5) / 4000
    tab = guide.U((np.arange(4000) + 0.5) * h)
    assert np.allclose(pt.fd_radial_eigenvalues(tab, 4000 * h, 4000, 1.0, 1.0, 5), fd, rtol=1e-14)


def test_fd_order(guide):
    exact = guide.lambda_sq(2)
    e = [abs(pt.fd_radial_eigenvalues(guide.U, 60.0, n, 1.0, 1.0, 3)[2] - exact) for n in (500, 1000)]
    assert math.log2(e[0] / e[1]) == pytest.approx(2.0, abs=0.2)


def test_orthonormal(guide):
    modes = pt.solve_modes(guide, fd_check=False)
    x, w = np.polynomial.laguerre.laggauss(80)
    # rho^2 = l^2 x turns 2 pi rho drho into pi l^2 dx against exp(-x)
    rho = guide.length * np.sqrt(x)
    G = np.array([[np.sum(w * np.exp(x) * a.radial(rho) * b.radial(rho)) * math.pi * guide.length**2
                   for b in modes] for a in modes])
    assert np.max(np.abs(G - np.eye(5))) < 1e-8


def test_radial_eigen_equation(guide):
    """-hbar^2 lap R + 2 m U R = Lambda^2 R with an O(h^2) residual."""
    mode = pt.solve_modes(guide, fd_check=False)[3]
    rho = np.linspace(0.5, 15.0, 40)
    errs = []
    for h in (0.02, 0.01):
        Rp, R0, Rm = mode.radial(rho + h), mode.radial(rho), mode.radial(rho - h)
        lap = (Rp - 2 * R0 + Rm) / h**2 + (Rp - Rm) / (2 * h * rho)
        errs.append(np.max(np.abs(-lap + 2 * guide.U(rho) * R0 - mode.Lambda_sq * R0)))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)


def test_beat_period(guide):
    ev = pt.pulse_train(guide, [(0, "+", 1.0), (0, "-", 1.0)])
    expected = 2 * math.pi / (2 * math.sqrt(0.9))
    assert expected == pytest.approx(3.3115, abs=1e-4)
    p, q = pt.solve_modes(guide, fd_check=False)[0].p_z_pair
    assert pt.beat_period(guide.ctx, p, q) == pytest.approx(expected, rel=1e-14)
    assert pt.measured_beat_period(ev, 10 * expected) == pytest.approx(expected, rel=1e-3)


def test_single_term_flat(guide):
    ev = pt.pulse_train(guide, [(2, "-", 0.3 + 0.4j)])
    v = np.abs(ev.comoving(1.3, np.linspace(-20, 20, 50)))
    assert np.ptp(v) < 1e-15 * v[0]


def test_zero_coefficients(guide):
    ev = pt.pulse_train(guide, [(0, "+", 0.0), (1, "-", 0.0)])
    assert np.all(ev(np.linspace(0, 3, 5), 0.2, 0.1) == 0)


def test_inadmissible(guide):
    with pytest.raises(DomainError):
        pt.pulse_train(guide, [(5, "+", 1.0)])
    with pytest.raises(ValueError):
        pt.pulse_train(guide, [(0, "x", 1.0)])


def test_offset_reduces(guide, rng):
    terms = [(0, "+", 1.0), (1, "-", 0.5j), (3, "+", -0.2)]
    r, z, t = rng.uniform(0, 5, 20), rng.uniform(-5, 5, 20), rng.uniform(-5, 5, 20)
    assert np.array_equal(pt.train_with_offset(guide, terms, 0.0)(r, z, t), pt.pulse_train(guide, terms)(r, z, t))


def test_offset_roots(ctx):
    g = pt.HarmonicGuide(ctx, 0.05)
    p, q = pt.p_z_roots(ctx, g.lambda_sq(0), 0.1)
    # roots of p^2 - 2 m V p + Lambda^2 - 2 m b = 0
    ref = np.sort(np.roots([1.0, -2.0, 0.1 - 0.2]).real)[::-1]
    assert (p, q) == pytest.approx(tuple(ref), rel=1e-12)
    # lower root is negative here: b = 0.1 > Lambda_0^2/(2m)
    with pytest.raises(DomainError):
        pt.train_with_offset(g, [(0, "-", 1.0)], 0.1)
    ev = pt.train_with_offset(g, [(0, "+", 1.0), (1, "-", 1.0)], 0.1)
    assert ev.params["p_z"][0] == pytest.approx(p)
    # mode 5 has Lambda^2 = 1.1 <= 1 + 2 b = 1.2: admissible only with the offset
    pt.train_with_offset(g, [(5, "+", 1.0)], 0.1)
    with pytest.raises(DomainError):
        pt.train_with_offset(g, [(6, "+", 1.0)], 0.1)


@given(st.floats(0.01, 0.4), st.floats(0.0, 0.5))
def test_roots_property(omega, b):
    c = PhysicalContext()
    g = pt.HarmonicGuide(c, omega)
    lam2 = g.lambda_sq(0)
    roots = pt.p_z_roots(c, lam2, b)
    if roots is None:
        assert 1 + 2 * b < lam2
        return
    for p in roots:
        assert (p * p + lam2) / 2 == pytest.approx(p + b, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("b", [0.0, 0.05])
def test_translation_and_residual(ctx, rng, b):
    g = pt.HarmonicGuide(ctx, 0.05)
    terms = [(0, "+", 1.0), (0, "-", 0.7), (2, "+", 0.3j)]
    ev = pt.train_with_offset(g, terms, b) if b else pt.pulse_train(g, terms)
    probes = np.column_stack([rng.uniform(0, 8, 200), rng.uniform(-8, 8, 200),
                              rng.uniform(-8, 8, 200), rng.uniform(-8, 8, 200)])
    assert rigid_translation_check(ev, ctx.V, probes) <= 1e-12
    grid = GridSpec(6.0, 8, -4.0, 4.0, 8, (0.0, 1.0))
    rep = schrodinger_residual(ev, grid, ctx, potential=g.U)
    assert rep.convergence_order == pytest.approx(2.0, abs=0.2)
    # without U the train is not a free solution: the residual does not shrink
    free = schrodinger_residual(ev, grid, ctx)
    assert free.convergence_order < 0.5
