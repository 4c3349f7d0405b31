import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.special as sc

from locwave import _kernels_py, kernels

BACKENDS = kernels.backends()


def test_compiled_backend_available():
    assert "cython" in BACKENDS, "compiled kernels missing; run `pip install -e . --no-build-isolation`"
    assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_j01_vs_scipy(name):
    impl = BACKENDS[name]
    x = np.concatenate([np.linspace(-30, 30, 1201), np.geomspace(30, 1e4, 300)])
    j0, j1 = impl.j01_real(x)
    assert np.max(np.abs(j0 - sc.j0(x))) < 2e-15
    assert np.max(np.abs(j1 - sc.j1(x))) < 2e-15
    assert np.array_equal(impl.j0_real(x), j0)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_csinc(name, rng):
    impl = BACKENDS[name]
    z = rng.normal(0, 10, 500) + 1j * rng.normal(0, 3, 500)
    z[:5] = [0, 1e-6, -1e-6j, 5e-5 + 5e-5j, np.pi]
    ref = np.where(z == 0, 1.0, np.sin(z) / np.where(z == 0, 1, z))
    assert np.max(np.abs(impl.csinc(z) - ref) / np.maximum(1, np.abs(ref))) < 1e-14


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_sinc_series_vs_direct(name, rng):
    impl = BACKENDS[name]
    gamma = rng.uniform(-20, 20, 300)
    beta2 = rng.uniform(0, 100, 300)
    coeffs = rng.normal(size=9) + 1j * rng.normal(size=9)
    n_min = -4
    direct = sum(c * np.sinc(np.sqrt((gamma + (n_min + i) * np.pi) ** 2 + beta2) / np.pi)
                 for i, c in enumerate(coeffs))
    assert np.max(np.abs(impl.sinc_series(gamma, beta2, coeffs, n_min) - direct)) < 1e-13


def test_backends_agree(rng):
    if len(BACKENDS) < 2:
        pytest.skip("only one backend")
    x = rng.uniform(0, 200, 5000)
    a = BACKENDS["cython"].j01_real(x)
    b = _kernels_py.j01_real(x)
    assert np.max(np.abs(a[0] - b[0])) < 1e-15 and np.max(np.abs(a[1] - b[1])) < 1e-15


def test_shape_preserved():
    x = np.linspace(0, 5, 12).reshape(3, 4)
    assert kernels.j0_real(x).shape == (3, 4)
    assert kernels.csinc(x.astype(complex)).shape == (3, 4)
    assert kernels.sinc_series(x, x, [1.0], 0).shape == (3, 4)


def test_env_forces_fallback():
    env = dict(os.environ, LOCWAVE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from locwave import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
