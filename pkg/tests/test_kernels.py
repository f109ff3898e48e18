"""The compiled kernels and the NumPy fallback must agree to rounding."""

import os
import subprocess
import sys

import numpy as np
import pytest

from endoconj import _kernels_py, kernels
from endoconj.jets import basis

_kernels = pytest.importorskip("endoconj._kernels")


@pytest.mark.parametrize("n,d", [(1, 8), (2, 6), (3, 5)])
def test_mul_trunc_matches(rng, n, d):
    b = basis(n, d)
    a = rng.standard_normal(b.size) + 1j * rng.standard_normal(b.size)
    c = rng.standard_normal(b.size) + 1j * rng.standard_normal(b.size)
    fast = _kernels.mul_trunc(a, c, b.ti, b.tj, b.tk, b.size)
    slow = _kernels_py.mul_trunc(a, c, b.ti, b.tj, b.tk, b.size)
    assert np.allclose(fast, slow, atol=1e-13)


@pytest.mark.parametrize("n,d", [(1, 8), (2, 6), (3, 4)])
def test_power_table_matches(rng, n, d):
    b = basis(n, d)
    g = rng.standard_normal((n, b.size)) + 1j * rng.standard_normal((n, b.size))
    g[:, 0] = 0
    fast = _kernels.power_table(g, b.parent, b.var, b.ti, b.tj, b.tk, b.size)
    slow = _kernels_py.power_table(g, b.parent, b.var, b.ti, b.tj, b.tk, b.size)
    assert np.allclose(fast, slow, atol=1e-12)


def test_eval_monomials_matches(rng):
    b = basis(3, 6)
    pts = 0.3 * (rng.standard_normal((50, 3)) + 1j * rng.standard_normal((50, 3)))
    fast = _kernels.eval_monomials(pts, b.parent, b.var)
    slow = _kernels_py.eval_monomials(pts, b.parent, b.var)
    assert np.allclose(fast, slow, atol=1e-14)


def test_product_of_monomials_lands_on_sum_of_exponents():
    b = basis(2, 4)
    a = np.zeros(b.size, complex)
    c = np.zeros(b.size, complex)
    a[b.index((1, 0))] = 1
    c[b.index((1, 2))] = 1
    out = kernels.mul_trunc(a, c, b.ti, b.tj, b.tk, b.size)
    assert out[b.index((2, 2))] == 1 and np.count_nonzero(out) == 1


def test_env_var_selects_fallback():
    code = "from endoconj import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, ENDOCONJ_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_backend_follows_environment():
    forced = os.environ.get("ENDOCONJ_PURE_PYTHON", "") in ("1", "true", "yes")
    assert kernels.BACKEND == ("python" if forced else "cython")
