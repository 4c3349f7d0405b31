"""Pure numpy versions of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function; selected by
:mod:`locwave.kernels` when the compiled module is unavailable.
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"

# Region boundaries for the real Bessel kernels.
_SERIES_MAX = 4.0
_ASYMPT_MIN = 25.0
_N_SERIES = 48
_N_ASYMPT = 30


def _series_jn(x, order):
    """Power series of J_0 / J_1 (no cancellation trouble for |x| <= 8)."""
    h = 0.25 * x * x
    term = np.ones_like(x) if order == 0 else 0.5 * x
    total = term.copy()
    for k in range(1, _N_SERIES):
        term = -term * h / (k * (k + order))
        total += term
        if np.all(np.abs(term) < 1e-17):
            break
    return total


def _miller_j01(x):
    """J_0 and J_1 by backward recurrence normalised with J0 + 2 sum J_2k = 1."""
    xmax = float(np.max(np.abs(x)))
    n_start = 2 * ((int(xmax) + 40 + int(2.0 * np.sqrt(xmax))) // 2)
    fkp1 = np.zeros_like(x)
    fk = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j1 = None
    two_over_x = 2.0 / x
    for k in range(n_start, 0, -1):
        fkm1 = (k * two_over_x) * fk - fkp1
        fkp1, fk = fk, fkm1
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * fk
        if k - 1 == 1:
            j1 = fk.copy()
    norm += fk
    return fk / norm, j1 / norm


def _asympt_j01(x):
    """Hankel large-argument expansion for J_0 and J_1 (x >= 25)."""
    out = []
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        p = np.ones_like(x)
        q = np.zeros_like(x)
        term = np.ones_like(x)
        inv8x = 1.0 / (8.0 * x)
        for k in range(1, _N_ASYMPT):
            term = term * (mu - (2 * k - 1) ** 2) * inv8x / k
            if k % 2 == 1:
                q += term * (1 if (k // 2) % 2 == 0 else -1)
            else:
                p += term * (1 if (k // 2) % 2 == 0 else -1)
            if np.all(np.abs(term) < 1e-17):
                break
        chi = x - (0.5 * nu + 0.25) * np.pi
        out.append(np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi)))
    return out[0], out[1]


def j01_real(x):
    """Return (J0(x), J1(x)) for a float array."""
    x = np.asarray(x, dtype=float)
    shape = x.shape
    xf = x.ravel()
    ax = np.abs(xf)
    j0 = np.empty_like(xf)
    j1 = np.empty_like(xf)
    small = ax <= _SERIES_MAX
    big = ax >= _ASYMPT_MIN
    mid = ~(small | big)
    if small.any():
        j0[small] = _series_jn(ax[small], 0)
        j1[small] = _series_jn(ax[small], 1)
    if mid.any():
        j0[mid], j1[mid] = _miller_j01(ax[mid])
    if big.any():
        j0[big], j1[big] = _asympt_j01(ax[big])
    j1 = np.where(xf < 0, -j1, j1)
    return j0.reshape(shape), j1.reshape(shape)


def j0_real(x):
    return j01_real(x)[0]


def j1_real(x):
    return j01_real(x)[1]


def csinc(z):
    """sin(z)/z for complex arrays with the removable singularity at 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    out = np.sin(zs) / zs
    z2 = z * z
    taylor = 1.0 - z2 / 6.0 + z2 * z2 / 120.0
    return np.where(small, taylor, out)


def sinc_series(gamma, beta2, coeffs, n_min):
    """sum_n coeffs[n - n_min] * csinc(sqrt((gamma + n pi)^2 + beta2)).

    ``gamma`` and ``beta2`` are broadcast-compatible float arrays; the sum runs
    in fixed index order so results do not depend on chunking.
    """
    gamma = np.asarray(gamma, dtype=float)
    beta2 = np.asarray(beta2, dtype=float)
    gamma, beta2 = np.broadcast_arrays(gamma, beta2)
    total = np.zeros(gamma.shape, dtype=complex)
    for i, c in enumerate(np.asarray(coeffs, dtype=complex)):
        if c == 0:
            continue
        n = n_min + i
        Z = np.sqrt((gamma + n * np.pi) ** 2 + beta2)
        small = Z < 1e-4
        Zs = np.where(small, 1.0, Z)
        sz = np.where(small, 1.0 - Z * Z / 6.0 + Z ** 4 / 120.0, np.sin(Zs) / Zs)
        total += c * sz
    return total
