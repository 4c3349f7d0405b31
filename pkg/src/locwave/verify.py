"""Independent checks: finite-difference residual, rigid translation, free propagation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import PhysicalContext
from .numerics import QDHT, FieldEvaluator, FieldGrid, GridError, GridSpec


class VerificationError(ArithmeticError):
    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location


@dataclass
class ResidualReport:
    max_residual: float          # at step h/2
    l2_residual: float           # RMS over probe points at step h/2
    convergence_order: float     # log2(max residual at h / max residual at h/2)
    max_residual_coarse: float   # at step h
    h: float
    dt: float
    scale: float                 # max |psi| over the probes
    n_probes: int
    meta: dict = field(default_factory=dict)


def _operator(evaluator, ctx, rho, z, t, phi, h, dt, potential, use_phi):
    """Discrete (laplacian + (2im/hbar) d/dt - (2m/hbar^2) U) psi at the probes."""
    m, hb = ctx.mass, ctx.hbar
    f0 = evaluator(rho, z, t, phi)
    fp = evaluator(rho + h, z, t, phi)
    lap = np.empty_like(f0)
    axis = rho == 0
    off = ~axis
    if off.any():
        fm = evaluator(np.where(off, rho - h, h), z, t, phi)
        r = np.where(off, rho, 1.0)
        lap_off = (fp - 2 * f0 + fm) / h**2 + (fp - fm) / (2 * h * r)
        lap = np.where(off, lap_off, lap)
    if axis.any():
        # regular axis limit of (1/rho) d/drho (rho d/drho) with mirror symmetry
        lap = np.where(axis, 4 * (fp - f0) / h**2, lap)
    if use_phi:
        fpp = evaluator(rho, z, t, phi + h)
        fpm = evaluator(rho, z, t, phi - h)
        lap = lap + (fpp - 2 * f0 + fpm) / (h**2 * np.where(axis, 1.0, rho) ** 2)
    lap = lap + (evaluator(rho, z + h, t, phi) - 2 * f0 + evaluator(rho, z - h, t, phi)) / h**2
    dtf = (evaluator(rho, z, t + dt, phi) - evaluator(rho, z, t - dt, phi)) / (2 * dt)
    res = lap + 2j * m / hb * dtf
    if potential is not None:
        res = res - 2 * m / hb**2 * np.asarray(potential(rho)) * f0
    bad = ~np.isfinite(res)
    if bad.any():
        i = int(np.flatnonzero(bad.ravel())[0])
        loc = (float(rho.ravel()[i]), float(z.ravel()[i]), float(t.ravel()[i]))
        raise VerificationError(f"non-finite field sample near (rho, z, t) = {loc}", location=loc)
    return res, f0


def schrodinger_residual(evaluator: FieldEvaluator, grid: GridSpec, ctx: PhysicalContext,
                         potential: Callable | None = None, h: float | None = None,
                         dt: float | None = None) -> ResidualReport:
    """Residual of the Schrodinger operator by central differences at the grid points.

    Stencils with spacing h and h/2 are applied around every probe (rho, zeta, t)
    of ``grid`` (z = zeta + V t).  The time step defaults to m h^2/hbar so the
    time and space truncation errors shrink together.  Fields that depend on
    phi (``evaluator.phi_dependent``) get the angular term and skip the axis.
    """
    hb, m = ctx.hbar, ctx.mass
    h = h or 0.05 * hb / (m * ctx.V)
    dt = dt or m * h * h / hb
    rho = grid.rho()
    zeta = grid.zeta()
    ts = np.array(grid.t_samples, dtype=float)
    use_phi = bool(getattr(evaluator, "phi_dependent", False))
    if use_phi:
        rho = rho[rho > 0]
    R, Zt, T = np.meshgrid(rho, zeta, ts, indexing="ij")
    Z = Zt + evaluator.V * T
    phi = np.full_like(R, grid.phi)
    coarse, f0 = _operator(evaluator, ctx, R, Z, T, phi, h, dt, potential, use_phi)
    fine, _ = _operator(evaluator, ctx, R, Z, T, phi, h / 2, dt / 4, potential, use_phi)
    mc = float(np.max(np.abs(coarse)))
    mf = float(np.max(np.abs(fine)))
    order = math.log2(mc / mf) if mf > 0 and mc > 0 else math.inf
    return ResidualReport(
        max_residual=mf, l2_residual=float(np.sqrt(np.mean(np.abs(fine) ** 2))), convergence_order=order,
        max_residual_coarse=mc, h=h, dt=dt, scale=float(np.max(np.abs(f0))), n_probes=int(R.size),
        meta={"family": evaluator.family, "potential": potential is not None},
    )


def rigid_translation_check(evaluator: FieldEvaluator, V: float, probes) -> float:
    """max | |psi(rho, z + V d, t + d)| - |psi(rho, z, t)| | / max |psi| over probes.

    ``probes`` is an array of rows (rho, z, t, d).
    """
    p = np.asarray(probes, dtype=float).reshape(-1, 4)
    rho, z, t, d = p.T
    a = np.abs(evaluator(rho, z, t))
    b = np.abs(evaluator(rho, z + V * d, t + d))
    scale = max(float(np.max(a)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def random_probes(rng, n, rho_max, z_span, t_span, d_span):
    return np.column_stack([
        rng.uniform(0, rho_max, n), rng.uniform(-z_span, z_span, n),
        rng.uniform(-t_span, t_span, n), rng.uniform(-d_span, d_span, n),
    ])


# --------------------------------------------------------------------------
# Spectral free propagation

def _norm2(grid: FieldGrid, q: QDHT):
    dz = grid.zeta[1] - grid.zeta[0]
    return float(np.sum(np.abs(grid.values[0]) ** 2 * q.w_r[:, None]) * dz * 2 * math.pi)


def field_norm(grid: FieldGrid) -> float:
    """L2 norm of a Bessel-node grid (QDHT weights in rho, rectangle rule in z)."""
    q = QDHT(grid.spec.n_rho, grid.spec.rho_max)
    return math.sqrt(_norm2(grid, q))


def free_propagate(initial: FieldGrid, dt: float, ctx: PhysicalContext, qdht: QDHT | None = None) -> FieldGrid:
    """Exact free evolution by dt: Hankel-0 transform in rho, FFT in z.

    The grid must use Bessel-node radial sampling and hold one time sample.
    The output samples the same lab-frame z positions, so its zeta axis is
    shifted by -V dt.  ``metadata['boundary_flag']`` is set when the input is
    above 1e-6 of its peak on the outer rho nodes or the z ends.
    """
    spec = initial.spec
    if spec.rho_nodes != "bessel":
        raise GridError("free_propagate needs a grid with rho_nodes='bessel'")
    if initial.values.shape[0] != 1:
        raise GridError("free_propagate takes a single time sample")
    q = qdht or QDHT(spec.n_rho, spec.rho_max)
    if not np.allclose(q.r, initial.rho, rtol=1e-14, atol=0):
        raise GridError("rho samples do not match the Bessel nodes of the grid")
    f = initial.values[0]
    peak = float(np.max(np.abs(f)))
    edge = max(float(np.max(np.abs(f[-1]))), float(np.max(np.abs(f[:, [0, -1]]))))
    flag = bool(peak > 0 and edge > 1e-6 * peak)
    dz = initial.zeta[1] - initial.zeta[0]
    kz = 2 * np.pi * np.fft.fftfreq(len(initial.zeta), d=dz)
    if dt == 0:
        out = f.copy()
    else:
        F = np.fft.fft(q.forward(f), axis=1)
        phase = np.exp(-1j * ctx.hbar * (q.k[:, None] ** 2 + kz[None, :] ** 2) * dt / (2 * ctx.mass))
        out = q.inverse(np.fft.ifft(F * phase, axis=1))
    V = initial.V
    t_new = float(initial.t[0]) + dt
    new_spec = GridSpec(spec.rho_max, spec.n_rho, spec.zeta_min - V * dt, spec.zeta_max - V * dt,
                        spec.n_zeta, (t_new,), spec.phi, "bessel")
    meta = dict(initial.metadata)
    meta.update({"propagated_by": dt, "boundary_flag": flag})
    return FieldGrid(spec=new_spec, values=out[None], rho=initial.rho.copy(), zeta=initial.zeta - V * dt,
                     t=np.array([t_new]), V=V, metadata=meta)
