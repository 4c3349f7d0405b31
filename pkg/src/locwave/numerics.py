"""Quadrature, Hankel transform, finite-difference stencils and sampling grids.

The adaptive integrator works on vector-valued integrands: ``f(x)`` receives a
1-D array of nodes and returns an array whose leading axis matches the nodes.
One call can therefore integrate the same kernel at many field points.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels

# Gauss-Kronrod 7/15 pair on [-1, 1] (abscissae of the positive half).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
GK15_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK15_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G7_WEIGHTS = np.zeros(15)
_G7_WEIGHTS[[1, 3, 5]] = _WG[:3]
_G7_WEIGHTS[[13, 11, 9]] = _WG[:3]
_G7_WEIGHTS[7] = _WG[3]


class IntegrationError(ArithmeticError):
    def __init__(self, msg, location=None):
        super().__init__(msg)
        self.location = location


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2000
    rule: str = "gk15"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.rule != "gk15":
            raise ValueError(f"unsupported rule {self.rule!r}")


@dataclass
class QuadResult:
    value: complex | np.ndarray
    error: float | np.ndarray
    converged: bool
    n_intervals: int
    n_evals: int
    meta: dict = field(default_factory=dict)


def _pairwise_sum(a, axis=0):
    # fixed-order pairwise reduction; np.add.reduce is already pairwise for
    # contiguous data but the explicit tree keeps the order independent of layout
    a = np.moveaxis(np.asarray(a), axis, 0)
    while a.shape[0] > 1:
        n = a.shape[0]
        head = a[: n - n % 2 : 2] + a[1 : n - n % 2 : 2]
        a = np.concatenate([head, a[n - 1 :]]) if n % 2 else head
    return a[0]


def _gk_apply(f, lo, hi):
    """Apply the 15-point rule to intervals [lo_i, hi_i]; returns (K, |K-G|)."""
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = (c[:, None] + h[:, None] * GK15_NODES[None, :]).ravel()
    y = np.asarray(f(x))
    if y.shape[0] != x.shape[0]:
        raise ValueError("integrand must return one row per node")
    bad = ~np.isfinite(y)
    if bad.any():
        idx = np.argwhere(bad)[0][0]
        raise IntegrationError(f"non-finite integrand value at x = {x[idx]!r}", location=float(x[idx]))
    y = y.reshape((len(lo), 15) + y.shape[1:])
    hshape = (len(lo),) + (1,) * (y.ndim - 2)
    wk = GK15_WEIGHTS.reshape((1, 15) + (1,) * (y.ndim - 2))
    wg = _G7_WEIGHTS.reshape((1, 15) + (1,) * (y.ndim - 2))
    K = (y * wk).sum(axis=1) * h.reshape(hshape)
    G = (y * wg).sum(axis=1) * h.reshape(hshape)
    return K, np.abs(K - G)


def integrate_complex(f: Callable, a: float, b: float, spec: QuadratureSpec | None = None,
                      breakpoints=None) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7/15) integration of a complex integrand.

    Each round bisects every interval whose error exceeds its share of the
    tolerance; intervals are kept in a fixed order, so the result depends only
    on the inputs.  Returns the integral, a per-component error estimate and
    a ``converged`` flag (the result is still returned when the tolerance is
    not met).
    """
    spec = spec or QuadratureSpec()
    edges = [float(a)] + sorted(float(p) for p in (breakpoints or []) if a < p < b) + [float(b)]
    lo = np.array(edges[:-1])
    hi = np.array(edges[1:])
    K, E = _gk_apply(f, lo, hi)
    n_evals = 15 * len(lo)
    converged = False
    while True:
        total = _pairwise_sum(K)
        err = _pairwise_sum(E)
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
        if np.all(err <= tol):
            converged = True
            break
        if len(lo) >= spec.max_subdivisions:
            break
        # score each interval by its worst component relative to tolerance
        score = (E / tol).reshape(len(lo), -1).max(axis=1)
        share = 1.0 / len(lo)
        split = score > 0.5 * share
        if not split.any():
            split = score >= score.max()
        room = spec.max_subdivisions - len(lo)
        idx = np.flatnonzero(split)
        if len(idx) > room:
            order = np.argsort(-score[idx], kind="stable")[:room]
            idx = np.sort(idx[order])
        mask = np.zeros(len(lo), dtype=bool)
        mask[idx] = True
        mid = 0.5 * (lo[mask] + hi[mask])
        new_lo = np.concatenate([lo[mask], mid])
        new_hi = np.concatenate([mid, hi[mask]])
        Kn, En = _gk_apply(f, new_lo, new_hi)
        n_evals += 15 * len(new_lo)
        keep = ~mask
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        K = np.concatenate([K[keep], Kn])
        E = np.concatenate([E[keep], En])
        order = np.argsort(lo, kind="stable")
        lo, hi, K, E = lo[order], hi[order], K[order], E[order]
    value = total
    error = err
    if np.ndim(value) == 0:
        value, error = complex(value), float(error)
    return QuadResult(value=value, error=error, converged=converged, n_intervals=len(lo),
                      n_evals=n_evals, meta={"rule": "gk15", "interval": (float(a), float(b))})


def integrate_semiinfinite(f: Callable, a: float, spec: QuadratureSpec | None = None,
                           scale: float = 1.0) -> QuadResult:
    """Integrate over [a, inf) via w = a + scale * s / (1 - s), s in [0, 1)."""
    if scale <= 0:
        raise ValueError("scale must be positive")

    def g(s):
        one_minus = 1.0 - s
        w = a + scale * s / one_minus
        jac = scale / (one_minus * one_minus)
        y = np.asarray(f(w))
        return y * jac.reshape((-1,) + (1,) * (y.ndim - 1))

    res = integrate_complex(g, 0.0, 1.0, spec)
    res.meta["substitution"] = f"w = {a!r} + {scale!r} * s / (1 - s)"
    res.meta["interval"] = (float(a), math.inf)
    return res


def integrate_gauss_legendre(f: Callable, a: float, b: float, n_panels: int = 64, order: int = 20):
    """Fixed composite Gauss-Legendre rule (independent cross-check rule)."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    c = 0.5 * (edges[:-1] + edges[1:])
    h = 0.5 * (edges[1:] - edges[:-1])
    nodes = (c[:, None] + h[:, None] * x[None, :]).ravel()
    y = np.asarray(f(nodes))
    wts = (h[:, None] * w[None, :]).ravel()
    y = y * wts.reshape((-1,) + (1,) * (y.ndim - 1))
    return _pairwise_sum(y)


# --------------------------------------------------------------------------
# Quasi-discrete Hankel transform of order 0

def bessel_j0_zeros(n: int) -> np.ndarray:
    """First ``n`` positive zeros of J_0 (McMahon start + Newton)."""
    k = np.arange(1, n + 1, dtype=float)
    beta = (k - 0.25) * np.pi
    x = beta + 1.0 / (8 * beta) - 124.0 / (3 * (8 * beta) ** 3)
    for _ in range(6):
        j0, j1 = kernels.j01_real(x)
        x = x + j0 / j1
    return x


class QDHT:
    """Order-0 quasi-discrete Hankel transform on Bessel-zero nodes.

    Forward: ``F(k) = int_0^R f(r) J0(k r) r dr``; the inverse has the same
    kernel.  ``r`` and ``k`` hold the sample positions; ``w_r``/``w_k`` are
    the quadrature weights for which Parseval holds.
    """

    def __init__(self, n: int, r_max: float):
        if n < 8:
            raise GridError("QDHT needs at least 8 nodes")
        zeros = bessel_j0_zeros(n + 1)
        self.n = n
        self.r_max = float(r_max)
        self.S = zeros[-1]
        j = zeros[:-1]
        self.k_max = self.S / self.r_max
        self.r = j / self.k_max
        self.k = j / self.r_max
        J1 = np.abs(kernels.j1_real(j))
        self._J1 = J1
        T = 2.0 * kernels.j0_real(np.outer(j, j) / self.S) / (np.outer(J1, J1) * self.S)
        self.T = T
        self.w_r = 2.0 * self.r_max**2 / (self.S**2 * J1**2)
        self.w_k = 2.0 * self.k_max**2 / (self.S**2 * J1**2)

    def forward(self, f):
        f = np.asarray(f)
        scale = (self.r_max / self._J1).reshape((-1,) + (1,) * (f.ndim - 1))
        back = (self._J1 / self.k_max).reshape((-1,) + (1,) * (f.ndim - 1))
        return back * np.tensordot(self.T, scale * f, axes=(1, 0))

    def inverse(self, F):
        F = np.asarray(F)
        scale = (self.k_max / self._J1).reshape((-1,) + (1,) * (F.ndim - 1))
        back = (self._J1 / self.r_max).reshape((-1,) + (1,) * (F.ndim - 1))
        return back * np.tensordot(self.T, scale * F, axes=(1, 0))


@dataclass
class HankelResult:
    k: np.ndarray
    F: np.ndarray
    meta: dict


def hankel0_transform(f_samples, r_max: float, qdht: QDHT | None = None) -> HankelResult:
    """Transform samples taken on ``QDHT(len(f), r_max).r``.

    Sets ``meta['support_warning']`` when the field at the outer nodes is
    above 1e-8 of its peak.
    """
    f = np.asarray(f_samples)
    q = qdht or QDHT(f.shape[0], r_max)
    peak = np.max(np.abs(f)) if f.size else 0.0
    edge = np.max(np.abs(f[-max(2, f.shape[0] // 50):])) if f.size else 0.0
    meta = {"support_warning": bool(peak > 0 and edge > 1e-8 * peak), "r_max": q.r_max}
    return HankelResult(k=q.k, F=q.forward(f), meta=meta)


# --------------------------------------------------------------------------
# Finite-difference stencils (second order, uniform spacing)

def _need(f, axis, n=3):
    if f.shape[axis] < n:
        raise GridError(f"need at least {n} points along axis {axis}, got {f.shape[axis]}")


def d1(f, h, axis=0):
    """Central first derivative at interior points (output shrinks by 2)."""
    f = np.asarray(f)
    _need(f, axis)
    f = np.moveaxis(f, axis, 0)
    return np.moveaxis((f[2:] - f[:-2]) / (2 * h), 0, axis)


def d2(f, h, axis=0):
    """Central second derivative at interior points (output shrinks by 2)."""
    f = np.asarray(f)
    _need(f, axis)
    f = np.moveaxis(f, axis, 0)
    return np.moveaxis((f[2:] - 2 * f[1:-1] + f[:-2]) / (h * h), 0, axis)


def radial_laplacian(f, h, axis=0):
    """(1/rho) d/drho (rho df/drho) on a uniform grid starting at rho = 0.

    Output covers rho = 0 .. rho_max - h (the last point has no outer
    neighbour).  At the axis the regular limit 2 f'' is used with the mirror
    value f(-h) = f(h).
    """
    f = np.asarray(f)
    _need(f, axis)
    g = np.moveaxis(f, axis, 0)
    n = g.shape[0]
    rho = (np.arange(1, n - 1) * h).reshape((-1,) + (1,) * (g.ndim - 1))
    inner = (g[2:] - 2 * g[1:-1] + g[:-2]) / (h * h) + (g[2:] - g[:-2]) / (2 * h * rho)
    axis_val = 4.0 * (g[1] - g[0]) / (h * h)
    out = np.concatenate([axis_val[None], inner], axis=0)
    return np.moveaxis(out, 0, axis)


# --------------------------------------------------------------------------
# Sampling grids

@dataclass(frozen=True)
class GridSpec:
    rho_max: float
    n_rho: int
    zeta_min: float
    zeta_max: float
    n_zeta: int
    t_samples: tuple = (0.0,)
    phi: float = 0.0
    rho_nodes: str = "uniform"

    def __post_init__(self):
        if self.n_rho < 8 or self.n_zeta < 8:
            raise GridError("n_rho and n_zeta must be >= 8")
        if not self.rho_max > 0:
            raise GridError("rho_max must be > 0")
        if not self.zeta_max > self.zeta_min:
            raise GridError("zeta_max must exceed zeta_min")
        if self.rho_nodes not in ("uniform", "bessel"):
            raise GridError("rho_nodes must be 'uniform' or 'bessel'")
        object.__setattr__(self, "t_samples", tuple(float(t) for t in self.t_samples))

    def rho(self):
        if self.rho_nodes == "bessel":
            return QDHT(self.n_rho, self.rho_max).r
        return np.linspace(0.0, self.rho_max, self.n_rho)

    def zeta(self):
        return np.linspace(self.zeta_min, self.zeta_max, self.n_zeta)

    def to_dict(self):
        return {
            "rho_max": self.rho_max, "n_rho": self.n_rho, "zeta_min": self.zeta_min,
            "zeta_max": self.zeta_max, "n_zeta": self.n_zeta, "t_samples": list(self.t_samples),
            "phi": self.phi, "rho_nodes": self.rho_nodes,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["t_samples"] = tuple(d.get("t_samples", (0.0,)))
        return cls(**d)


@dataclass
class FieldGrid:
    """Complex field sampled on ``spec``; values have shape (n_t, n_rho, n_zeta).

    ``zeta`` is the co-moving coordinate z - V t; ``V`` is stored so lab
    coordinates can be recovered.
    """
    spec: GridSpec
    values: np.ndarray
    rho: np.ndarray
    zeta: np.ndarray
    t: np.ndarray
    V: float = 1.0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        shape = (len(self.t), len(self.rho), len(self.zeta))
        if self.values.shape != shape:
            raise GridError(f"values shape {self.values.shape} does not match grid {shape}")
        if not np.all(np.isfinite(self.values)):
            bad = np.argwhere(~np.isfinite(self.values))[0]
            raise GridError(f"non-finite field value at index {tuple(int(i) for i in bad)}")


def sample_field(evaluator, spec: GridSpec, V: float, threads: int = 1, metadata=None) -> FieldGrid:
    """Evaluate ``evaluator(rho, z, t, phi)`` on the grid.

    Work is split into one chunk per (t, rho) row regardless of ``threads``,
    so the output is identical for any thread count.
    """
    rho = spec.rho()
    zeta = spec.zeta()
    ts = np.array(spec.t_samples, dtype=float)
    jobs = [(it, ir) for it in range(len(ts)) for ir in range(len(rho))]

    def row(job):
        it, ir = job
        t = ts[it]
        z = zeta + V * t
        r = np.full_like(zeta, rho[ir])
        return np.asarray(evaluator(r, z, np.full_like(zeta, t), spec.phi), dtype=complex)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(row, jobs))
    else:
        rows = [row(j) for j in jobs]
    values = np.array(rows).reshape(len(ts), len(rho), len(zeta))
    meta = dict(metadata or {})
    meta.update(getattr(evaluator, "metadata", {}) or {})
    return FieldGrid(spec=spec, values=values, rho=rho, zeta=zeta, t=ts, V=V, metadata=meta)


def warn_once(msg):
    warnings.warn(msg, RuntimeWarning, stacklevel=3)


# --------------------------------------------------------------------------
# Field evaluators

@dataclass
class ComplexAmplitude:
    """A field value together with where it was evaluated."""
    value: complex
    rho: float
    z: float
    t: float
    phi: float = 0.0
    error: float = 0.0
    converged: bool = True
    divergent: bool = False


class FieldEvaluator:
    """Callable ``(rho, z, t, phi=0) -> complex ndarray`` with metadata.

    ``func`` must broadcast its array arguments.  ``V`` is the speed of the
    co-moving frame the field is built around.
    """

    def __init__(self, func: Callable, V: float, family: str, params: dict | None = None,
                 phi_dependent: bool = False):
        self._func = func
        self.V = float(V)
        self.family = family
        self.params = dict(params or {})
        self.phi_dependent = phi_dependent

    @property
    def metadata(self):
        return {"family": self.family, "params": dict(self.params)}

    def __call__(self, rho, z, t, phi=0.0):
        rho = np.asarray(rho, dtype=float)
        if np.any(rho < 0):
            raise GridError("rho must be >= 0")
        out = self._func(rho, np.asarray(z, dtype=float), np.asarray(t, dtype=float),
                         np.asarray(phi, dtype=float))
        return np.asarray(out, dtype=complex)

    def comoving(self, rho, zeta, t=0.0, phi=0.0):
        """Evaluate at co-moving position ``zeta`` (z = zeta + V t)."""
        t = np.asarray(t, dtype=float)
        return self(rho, np.asarray(zeta, dtype=float) + self.V * t, t, phi)

    def at(self, rho, z, t, phi=0.0) -> ComplexAmplitude:
        v = complex(self(rho, z, t, phi))
        return ComplexAmplitude(v, float(rho), float(z), float(t), float(phi))

    def sample(self, spec: GridSpec, threads: int = 1) -> FieldGrid:
        return sample_field(self, spec, self.V, threads=threads)

    def scaled(self, c: complex) -> "FieldEvaluator":
        f = self._func
        return FieldEvaluator(lambda r, z, t, p: c * f(r, z, t, p), self.V, self.family,
                              {**self.params, "scale": c}, self.phi_dependent)
