import numpy as np
import pytest
from scipy.signal import convolve2d

from dkglab import kernels


def _random(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _units(rng, N):
    v = rng.standard_normal((N, N, 2))
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    v[0, 0] = 0.0  # excluded mode
    return v


def brute_nullform(a, b, ua, ub, amod, bmod):
    _, T, N, _ = a.shape
    lhs = np.zeros((2 * T - 1, 2 * N - 1, 2 * N - 1), complex)
    rhs = np.zeros(lhs.shape)
    for ka in np.ndindex(T, N, N):
        for kb in np.ndindex(T, N, N):
            if not ua[ka[1:]].any() or not ub[kb[1:]].any():
                continue
            o = tuple(p - q + n - 1 for p, q, n in zip(ka, kb, (T, N, N)))
            lhs[o] += np.vdot(b[(slice(None),) + kb], a[(slice(None),) + ka])
            ang = np.arccos(np.clip(ua[ka[1:]] @ ub[kb[1:]], -1, 1))
            rhs[o] += ang * amod[ka] * bmod[kb]
    return lhs, rhs


@pytest.fixture
def nullform_inputs():
    rng = np.random.default_rng(0)
    T, N = 3, 4
    return (_random(rng, (2, T, N, N)), _random(rng, (2, T, N, N)), _units(rng, N), _units(rng, N),
            rng.uniform(0, 1, (T, N, N)), rng.uniform(0, 1, (T, N, N)))


def test_nullform_numpy_matches_brute_force(nullform_inputs):
    lhs, rhs = kernels._nullform_conv_numpy(*nullform_inputs)
    ref_l, ref_r = brute_nullform(*nullform_inputs)
    assert np.allclose(lhs, ref_l, atol=1e-12)
    assert np.allclose(rhs, ref_r, atol=1e-12)


def test_nullform_numba_matches_numpy(nullform_inputs):
    numba = pytest.importorskip("numba")  # noqa: F841
    l1, r1 = kernels._nullform_conv_numba(*nullform_inputs)
    l2, r2 = kernels._nullform_conv_numpy(*nullform_inputs)
    assert np.allclose(l1, l2, atol=1e-12)
    assert np.allclose(r1, r2, atol=1e-12)


@pytest.mark.parametrize("impl", ["numpy", "numba"])
def test_direct_convolution_matches_scipy(impl):
    if impl == "numba":
        pytest.importorskip("numba")
    rng = np.random.default_rng(1)
    f, g = _random(rng, (6, 6)), _random(rng, (6, 6))
    f[2, 3] = 0
    fn = {"numpy": kernels._direct_conv2_numpy, "numba": kernels._direct_conv2_numba}[impl]
    assert np.allclose(fn(f, g), convolve2d(f, g), atol=1e-12)
    assert np.allclose(kernels.direct_convolution2(f, g), convolve2d(f, g), atol=1e-12)


@pytest.mark.parametrize("dtype", [np.complex64, np.complex128])
def test_spinor_pairing(dtype):
    rng = np.random.default_rng(2)
    a, b = _random(rng, (2, 5, 7)).astype(dtype), _random(rng, (2, 5, 7)).astype(dtype)
    out = kernels.spinor_pairing(a, b)
    assert out.dtype == dtype and out.shape == (5, 7)
    ref = np.einsum("i...,i...->...", a.astype(complex), np.conj(b.astype(complex)))
    tol = 1e-5 if dtype == np.complex64 else 1e-13
    assert np.allclose(out, ref, atol=tol)
    assert np.allclose(kernels._spinor_pairing_numpy(a, b), ref, atol=tol)


def test_spinor_pairing_promotes_mixed_precision():
    a = np.ones((2, 3, 3), np.complex64)
    b = np.ones((2, 3, 3), np.complex128)
    assert kernels.spinor_pairing(a, b).dtype == np.complex128
