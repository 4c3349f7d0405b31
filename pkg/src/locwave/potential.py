"""Pulse trains guided by a transverse harmonic potential U(rho) = m w^2 rho^2 / 2.

Separating psi = R(rho) exp(i (p_z z - E t)/hbar) gives the transverse problem

    -hbar^2 lap_perp R + 2 m U R = Lambda^2 R,    E = (p_z^2 + Lambda^2) / (2m).

Each parabola E(p_z) meets the line E = V p_z + b twice; the two crossings
give the longitudinal momenta used in the train.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .core import DomainError, PhysicalContext
from .numerics import FieldEvaluator
from .specfun import laguerre_poly


class NoAdmissibleModes(DomainError):
    def __init__(self, msg, threshold):
        super().__init__(msg)
        self.threshold = threshold


@dataclass(frozen=True)
class HarmonicGuide:
    ctx: PhysicalContext
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise DomainError("omega must be finite and > 0")

    def U(self, rho):
        return 0.5 * self.ctx.mass * self.omega**2 * np.asarray(rho, dtype=float) ** 2

    @property
    def length(self) -> float:
        """Oscillator length sqrt(hbar/(m omega))."""
        return math.sqrt(self.ctx.hbar / (self.ctx.mass * self.omega))

    def lambda_sq(self, n: int) -> float:
        c = self.ctx
        return 2 * c.mass * c.hbar * self.omega * (2 * n + 1)


@dataclass(frozen=True)
class GuideMode:
    guide: HarmonicGuide
    n: int
    Lambda_sq: float
    p_z_pair: tuple   # (p_z+, p_z-) on the line E = V p_z

    def radial(self, rho):
        """Unit-normalized Laguerre-Gauss profile: int |R|^2 2 pi rho drho = 1."""
        g = self.guide
        x = np.asarray(rho, dtype=float) ** 2 / g.length**2
        return laguerre_poly(self.n, x) * np.exp(-x / 2) / (math.sqrt(math.pi) * g.length)


def p_z_roots(ctx: PhysicalContext, lambda_sq: float, b: float = 0.0):
    """Crossings of E = V p_z + b with E = (p_z^2 + Lambda^2)/(2m): (p+, p-) or None."""
    m, V = ctx.mass, ctx.V
    disc = (m * V) ** 2 + 2 * m * b - lambda_sq
    if disc < 0:
        return None
    p_plus = m * V + math.sqrt(disc)
    # product of the roots is Lambda^2 - 2 m b; avoids cancellation in the lower root
    p_minus = (lambda_sq - 2 * m * b) / p_plus
    return p_plus, p_minus


def solve_modes(guide: HarmonicGuide, fd_check: bool = True, fd_points: int = 4000):
    """Admissible l = 0 modes (Lambda_n <= mV), lowest first.

    With ``fd_check`` the analytic Lambda_n^2 are compared with the
    finite-difference eigensolver and a DomainError is raised if any differs
    by more than 0.1%.
    """
    c = guide.ctx
    mV2 = (c.mass * c.V) ** 2
    modes = []
    n = 0
    while guide.lambda_sq(n) <= mV2 * (1 + 1e-14):
        lam2 = guide.lambda_sq(n)
        pair = p_z_roots(c, min(lam2, mV2))
        modes.append(GuideMode(guide, n, lam2, pair))
        n += 1
    if not modes:
        raise NoAdmissibleModes(
            f"no admissible guided mode: need 2 m hbar omega <= (m V)^2, "
            f"i.e. omega <= {mV2 / (2 * c.mass * c.hbar)!r}", threshold=mV2 / (2 * c.mass * c.hbar))
    if fd_check:
        fd = fd_radial_eigenvalues(guide.U, 12 * guide.length * math.sqrt(len(modes)), fd_points,
                                   c.mass, c.hbar, len(modes))
        for mode, lam_fd in zip(modes, fd):
            if abs(lam_fd - mode.Lambda_sq) > 1e-3 * mode.Lambda_sq:
                raise DomainError(f"finite-difference check failed for mode {mode.n}: "
                                  f"{lam_fd!r} vs {mode.Lambda_sq!r}")
    return modes


def fd_radial_eigenvalues(U, rho_max: float, n_points: int, mass: float, hbar: float, k: int):
    """Lowest k eigenvalues of -hbar^2 (1/rho)(rho R')' + 2 m U(rho) R (l = 0).

    ``U`` is a callable or an array sampled at the cell centres
    rho_i = (i + 1/2) h.  Conservative flux form with zero flux through the
    axis and R = 0 beyond rho_max; symmetrized with sqrt(rho) so the
    tridiagonal solver applies.
    """
    h = rho_max / n_points
    rc = (np.arange(n_points) + 0.5) * h
    Uv = np.asarray(U(rc) if callable(U) else U, dtype=float)
    if Uv.shape != rc.shape:
        raise ValueError("tabulated U must have n_points entries")
    r_plus = rc + 0.5 * h
    r_minus = rc - 0.5 * h
    c = hbar**2 / h**2
    diag = c * (r_plus + r_minus) / rc + 2 * mass * Uv
    off = -c * r_plus[:-1] / np.sqrt(rc[:-1] * rc[1:])
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, k - 1), eigvals_only=True)


@dataclass(frozen=True)
class TrainTerm:
    n: int
    branch: str   # "+" or "-"
    f: complex


def _terms(terms):
    out = []
    for t in terms:
        t = t if isinstance(t, TrainTerm) else TrainTerm(*t)
        if t.branch not in ("+", "-"):
            raise ValueError("branch must be '+' or '-'")
        out.append(t)
    return out


def train_with_offset(guide: HarmonicGuide, terms: Sequence, b: float) -> FieldEvaluator:
    """sum_k f_k R_{n_k}(rho) exp(i p_k (z - V t)/hbar) * exp(-i b t/hbar).

    ``terms`` holds (n, branch, f) with branch '+' or '-' picking the crossing
    of E = V p_z + b with that mode's parabola.
    """
    c = guide.ctx
    if b < 0:
        raise DomainError("b must be >= 0")
    terms = _terms(terms)
    modes, ps, fs = [], [], []
    for t in terms:
        if t.n < 0:
            raise DomainError("mode index must be >= 0")
        lam2 = guide.lambda_sq(t.n)
        roots = p_z_roots(c, lam2, b)
        if roots is None:
            raise DomainError(f"mode {t.n} does not cross the line E = V p_z + b "
                              f"(needs Lambda^2 <= (mV)^2 + 2 m b)")
        p = roots[0] if t.branch == "+" else roots[1]
        if p < 0:
            raise DomainError(f"mode {t.n}, branch {t.branch}: p_z = {p!r} < 0 (backward travelling)")
        modes.append(GuideMode(guide, t.n, lam2, roots))
        ps.append(p)
        fs.append(complex(t.f))
    hb, V = c.hbar, c.V

    def f(rho, z, t, phi):
        zeta = z - V * t
        out = np.zeros(np.broadcast(rho, zeta).shape, dtype=complex)
        for mode, p, fk in zip(modes, ps, fs):
            if fk != 0:
                out = out + fk * mode.radial(rho) * np.exp(1j * p * zeta / hb)
        return out * np.exp(-1j * b * t / hb)

    return FieldEvaluator(f, V, "potential_train",
                          {"omega": guide.omega, "b": b, "terms": [(t.n, t.branch, complex(t.f)) for t in terms],
                           "p_z": ps})


def pulse_train(guide: HarmonicGuide, terms: Sequence) -> FieldEvaluator:
    """Train on the line E = V p_z; every selected mode must satisfy Lambda_n <= mV."""
    c = guide.ctx
    for t in _terms(terms):
        if guide.lambda_sq(t.n) > (c.mass * c.V) ** 2 * (1 + 1e-14):
            raise DomainError(f"mode {t.n} is not admissible: Lambda_n > mV")
    return train_with_offset(guide, terms, 0.0)


def beat_period(ctx: PhysicalContext, p_plus: float, p_minus: float) -> float:
    return 2 * math.pi * ctx.hbar / (p_plus - p_minus)


def measured_beat_period(evaluator: FieldEvaluator, zeta_max: float, n: int = 20001) -> float:
    """Period of |Psi(0, zeta)|^2 from the spacing of its maxima."""
    z = np.linspace(0.0, zeta_max, n)
    I = np.abs(evaluator.comoving(0.0, z)) ** 2
    idx = np.flatnonzero((I[1:-1] > I[:-2]) & (I[1:-1] >= I[2:])) + 1
    if len(idx) < 2:
        raise ValueError("fewer than two maxima in the window")
    # refine each maximum with a parabola through its neighbours
    dz = z[1] - z[0]
    num = I[idx - 1] - I[idx + 1]
    den = I[idx - 1] - 2 * I[idx] + I[idx + 1]
    zp = z[idx] + 0.5 * dz * num / den
    return float((zp[-1] - zp[0]) / (len(zp) - 1))
