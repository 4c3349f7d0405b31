"""Special functions needed by the closed-form solutions.

Self-contained: series, Miller backward recurrence, asymptotic expansions
and continued fractions on numpy arrays.  Principal branches throughout.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels

EULER_GAMMA = 0.57721566490153286061


class SpecialFunctionError(ArithmeticError):
    pass


class SingularityError(SpecialFunctionError):
    pass


class RangeError(SpecialFunctionError):
    def __init__(self, msg, magnitude):
        super().__init__(msg)
        self.magnitude = magnitude


def _as_complex(z):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite complex argument")
    return z


def _ret(out, like):
    return out.item() if np.ndim(like) == 0 else out


# --------------------------------------------------------------------------
# Real Bessel functions of integer order

def bessel_j(n: int, x):
    """J_n(x) for integer n >= 0 and real x.

    J_0 and J_1 come from the kernel backend; higher orders use backward
    recurrence from a start well above max(n, |x|), normalised by J_0.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"order must be a non-negative integer, got {n!r}")
    n = int(n)
    x = np.asarray(x, dtype=float)
    j0, j1 = kernels.j01_real(x)
    if n == 0:
        return _ret(j0, x)
    if n == 1:
        return _ret(j1, x)
    xf = x.ravel()
    j0f = j0.ravel()
    j1f = j1.ravel()
    out = np.empty_like(xf)
    ax = np.abs(xf)
    zero = ax == 0
    out[zero] = 0.0
    # forward recurrence is stable while n < |x|
    fwd = (~zero) & (ax > n)
    if fwd.any():
        a, b = j0f[fwd], j1f[fwd]
        xa = xf[fwd]
        for k in range(1, n):
            a, b = b, (2.0 * k / xa) * b - a
        out[fwd] = b
    back = (~zero) & ~fwd
    if back.any():
        xb = ax[back]
        start = 2 * ((n + int(np.max(xb)) + 40 + int(math.sqrt(40 * n))) // 2)
        fkp1 = np.zeros_like(xb)
        fk = np.full_like(xb, 1e-30)
        want = None
        for k in range(start, 0, -1):
            fkm1 = (2.0 * k / xb) * fk - fkp1
            fkp1, fk = fk, fkm1
            big = np.abs(fk) > 1e250
            if big.any():
                scale = np.where(big, 1e-250, 1.0)
                fk, fkp1 = fk * scale, fkp1 * scale
                if want is not None:
                    want = want * scale
            if k - 1 == n:
                want = fk.copy()
        # fk is now proportional to J_0
        val = want * (j0f[back] / fk)
        sign = np.where((xf[back] < 0) & (n % 2 == 1), -1.0, 1.0)
        out[back] = sign * val
    return _ret(out.reshape(x.shape), x)


# --------------------------------------------------------------------------
# Complex-argument J0 and I0

_MAX_ABS = 700.0
_C_SERIES_MAX = 8.0
_C_ASYMPT_MIN = 25.0


def _guard(z):
    a = np.abs(z)
    if np.any(a > _MAX_ABS):
        raise RangeError(f"|z| = {float(np.max(a)):.6g} exceeds overflow guard {_MAX_ABS}",
                         float(np.max(a)))


def _series0(z, sign):
    """sum_k (sign z^2/4)^k / (k!)^2: sign=-1 gives J0, +1 gives I0."""
    h = sign * 0.25 * z * z
    term = np.ones_like(z)
    total = term.copy()
    for k in range(1, 80):
        term = term * h / (k * k)
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _hankel_coeffs(nterms):
    a = [1.0]
    for k in range(1, nterms):
        a.append(a[-1] * (0.0 - (2 * k - 1) ** 2) / (k * 8.0))
    return a


_HK = _hankel_coeffs(40)


def _j0_asympt(z):
    # Re z >= 0 assumed
    p = np.zeros_like(z)
    q = np.zeros_like(z)
    zk = np.ones_like(z)
    for k, a in enumerate(_HK):
        t = a / zk
        if k % 2 == 0:
            p = p + t * (-1) ** (k // 2)
        else:
            q = q + t * (-1) ** (k // 2)
        zk = zk * z
        if k > 8 and np.all(np.abs(t) < 1e-17):
            break
    chi = z - 0.25 * np.pi
    return np.sqrt(2.0 / (np.pi * z)) * (p * np.cos(chi) - q * np.sin(chi))


def _j0_miller(z):
    zmax = float(np.max(np.abs(z)))
    start = 2 * ((int(1.2 * zmax) + 40) // 2)
    c = np.where(z.imag >= 0, -1j, 1j)
    target = np.exp(c * z)  # e^{-iz} when Im z >= 0
    fkp1 = np.zeros_like(z)
    fk = np.full_like(z, 1e-30)
    norm = np.zeros_like(z)
    for k in range(start, 0, -1):
        fkm1 = (2.0 * k / z) * fk - fkp1
        fkp1, fk = fk, fkm1
        if k - 1 > 0:
            norm = norm + 2.0 * c ** (k - 1) * fk
    norm = norm + fk
    return fk * target / norm


def bessel_j0_complex(z):
    """J_0 of a complex argument, principal values, |z| <= 700."""
    z = _as_complex(z)
    _guard(z)
    zf = z.ravel()
    zf = np.where(zf.real < 0, -zf, zf)  # J0 is even
    a = np.abs(zf)
    out = np.empty_like(zf)
    s = a < _C_SERIES_MAX
    big = a >= _C_ASYMPT_MIN
    mid = ~(s | big)
    if s.any():
        out[s] = _series0(zf[s], -1.0)
    if mid.any():
        out[mid] = _j0_miller(zf[mid])
    if big.any():
        out[big] = _j0_asympt(zf[big])
    return _ret(out.reshape(z.shape), z)


def _i0_miller(z):
    zmax = float(np.max(np.abs(z)))
    start = 2 * ((int(1.2 * zmax) + 40) // 2)
    fkp1 = np.zeros_like(z)
    fk = np.full_like(z, 1e-30)
    norm = np.zeros_like(z)
    for k in range(start, 0, -1):
        fkm1 = (2.0 * k / z) * fk + fkp1
        fkp1, fk = fk, fkm1
        if k - 1 > 0:
            norm = norm + 2.0 * fk
    norm = norm + fk
    return fk * np.exp(z) / norm


def _i0_asympt(z):
    # Re z >= 0; both exponentials kept so the imaginary axis is covered
    s1 = np.zeros_like(z)
    s2 = np.zeros_like(z)
    zk = np.ones_like(z)
    for k, a in enumerate(_HK):
        t = a / zk
        s1 = s1 + t * (-1) ** k
        s2 = s2 + t
        zk = zk * z
        if k > 8 and np.all(np.abs(t) < 1e-17):
            break
    pref = 1.0 / np.sqrt(2.0 * np.pi * z)
    branch = np.where(z.imag >= 0, 1j, -1j)
    return pref * (np.exp(z) * s1 + branch * np.exp(-z) * s2)


def mod_bessel_i0_complex(z):
    """I_0 of a complex argument, |z| <= 700, independent of the J_0 route."""
    z = _as_complex(z)
    _guard(z)
    zf = z.ravel()
    zf = np.where(zf.real < 0, -zf, zf)
    a = np.abs(zf)
    out = np.empty_like(zf)
    s = a < _C_SERIES_MAX
    big = a >= _C_ASYMPT_MIN
    mid = ~(s | big)
    if s.any():
        out[s] = _series0(zf[s], 1.0)
    if mid.any():
        out[mid] = _i0_miller(zf[mid])
    if big.any():
        out[big] = _i0_asympt(zf[big])
    return _ret(out.reshape(z.shape), z)


# --------------------------------------------------------------------------

def csinc(Z):
    """sin(Z)/Z with csinc(0) = 1; even Taylor series for |Z| < 1e-4."""
    Z = _as_complex(Z)
    return _ret(kernels.csinc(Z), Z)


# --------------------------------------------------------------------------
# Exponential integral E1 = Gamma(0, z)

def exp_integral_E1_complex(z):
    """E1(z) = Gamma(0, z) for z != 0, |arg z| < pi."""
    z = _as_complex(z)
    if np.any(z == 0):
        raise SingularityError("E1 diverges logarithmically at z = 0")
    if np.any((z.imag == 0) & (z.real < 0)):
        raise SingularityError("E1 branch cut: arg z = pi")
    zf = z.ravel()
    out = np.empty_like(zf)
    # series where its cancellation stays below ~e^10; continued fraction elsewhere
    s = (np.abs(zf) <= 4.0) | (np.abs(zf) + zf.real < 10.0)
    if s.any():
        zs = zf[s]
        total = np.zeros_like(zs)
        term = np.ones_like(zs)
        for k in range(1, 400):
            term = term * (-zs) / k
            inc = term / k
            total = total + inc
            if np.all(np.abs(inc) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
                break
        out[s] = -EULER_GAMMA - np.log(zs) - total
    c = ~s
    if c.any():
        zc = zf[c]
        # modified Lentz on e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...)))
        tiny = 1e-300
        b = zc + 1.0
        f = 1.0 / b
        C = 1.0 / tiny * np.ones_like(zc)
        D = 1.0 / b
        h = f
        done = np.zeros(zc.shape, dtype=bool)
        for i in range(1, 5000):
            an = -float(i * i)
            b = b + 2.0
            D = an * D + b
            D = np.where(np.abs(D) < tiny, tiny, D)
            C = b + an / C
            C = np.where(np.abs(C) < tiny, tiny, C)
            D = 1.0 / D
            delta = C * D
            h = h * delta
            done |= np.abs(delta - 1.0) < 4e-16
            if done.all():
                break
        out[c] = h * np.exp(-zc)
    return _ret(out.reshape(z.shape), z)


def ein_complex(z):
    """Entire exponential integral Ein(z) = int_0^z (1 - e^{-t}) / t dt.

    Ein(z) = E1(z) + ln z + gamma off the negative real axis; the power
    series is used for |z| <= 2 where that relation cancels.
    """
    z = _as_complex(z)
    zf = z.ravel()
    out = np.empty_like(zf)
    s = np.abs(zf) <= 2.0
    if s.any():
        zs = zf[s]
        total = np.zeros_like(zs)
        term = -np.ones_like(zs)
        for k in range(1, 60):
            term = term * (-zs) / k
            total = total + term / k
        out[s] = total
    c = ~s
    if c.any():
        out[c] = exp_integral_E1_complex(zf[c]) + np.log(zf[c]) + EULER_GAMMA
    return _ret(out.reshape(z.shape), z)


# --------------------------------------------------------------------------
# Complementary error function

def _erf_series(z):
    z2 = z * z
    term = z.copy()
    total = z.copy()
    for k in range(1, 2000):
        term = -term * z2 / k
        inc = term / (2 * k + 1)
        total = total + inc
        if np.all(np.abs(inc) <= 1e-17 * np.abs(total)):
            break
    return total * (2.0 / math.sqrt(math.pi))


def _erfc_cf(z):
    # erfc z = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    tiny = 1e-300
    f = z.copy()
    C = z.copy()
    D = np.zeros_like(z)
    done = np.zeros(z.shape, dtype=bool)
    for k in range(1, 5000):
        a = 0.5 * k
        D = z + a * D
        D = np.where(np.abs(D) < tiny, tiny, D)
        C = z + a / C
        C = np.where(np.abs(C) < tiny, tiny, C)
        D = 1.0 / D
        delta = C * D
        f = f * delta
        done |= np.abs(delta - 1.0) < 4e-16
        if done.all():
            break
    return np.exp(-z * z) / (math.sqrt(math.pi) * f)


def erfc_complex(z):
    """erfc(z) = 1 - erf(z) for complex z with |Im z^2| <= 700."""
    z = _as_complex(z)
    z2 = z * z
    if np.any(np.abs(z2.imag) > _MAX_ABS) or np.any(-z2.real > _MAX_ABS):
        raise RangeError("erfc argument overflows (|Im z^2| or -Re z^2 > 700)",
                         float(np.max(np.abs(z))))
    zf = z.ravel()
    neg = zf.real < 0
    w = np.where(neg, -zf, zf)
    out = np.empty_like(w)
    cf = (np.abs(w) >= 2.0) & (w.real >= 1.5)
    ser = ~cf
    if ser.any():
        out[ser] = 1.0 - _erf_series(w[ser])
    if cf.any():
        out[cf] = _erfc_cf(w[cf])
    out = np.where(neg, 2.0 - out, out)
    return _ret(out.reshape(z.shape), z)


# --------------------------------------------------------------------------

def laguerre_poly(n: int, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    if int(n) != n or n < 0:
        raise ValueError("n must be a non-negative integer")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return _ret(prev, x)
    cur = 1.0 - x
    for k in range(1, int(n)):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return _ret(cur, x)
