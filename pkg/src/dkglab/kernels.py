"""Hot loops with a numba implementation and a vectorised numpy fallback.

The public functions dispatch on :data:`dkglab._accel.USE_NUMBA`; the
``*_numba`` and ``*_numpy`` variants are importable directly for testing and
benchmarking.  Both variants must agree to rounding.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


@njit(cache=True)
def _nullform_conv_numba(a, b, ua, ub, amod, bmod):
    nc, T, N, _ = a.shape
    lhs = np.zeros((2 * T - 1, 2 * N - 1, 2 * N - 1), dtype=np.complex128)
    rhs = np.zeros((2 * T - 1, 2 * N - 1, 2 * N - 1), dtype=np.float64)
    for kt in range(T):
        for k1 in range(N):
            for k2 in range(N):
                ax = ua[k1, k2, 0]
                ay = ua[k1, k2, 1]
                if ax == 0.0 and ay == 0.0:
                    continue
                am = amod[kt, k1, k2]
                a0 = a[0, kt, k1, k2]
                a1 = a[1, kt, k1, k2]
                for jt in range(T):
                    ot = kt - jt + T - 1
                    for j1 in range(N):
                        o1 = k1 - j1 + N - 1
                        for j2 in range(N):
                            bx = ub[j1, j2, 0]
                            by = ub[j1, j2, 1]
                            if bx == 0.0 and by == 0.0:
                                continue
                            o2 = k2 - j2 + N - 1
                            lhs[ot, o1, o2] += a0 * np.conj(b[0, jt, j1, j2]) + a1 * np.conj(b[1, jt, j1, j2])
                            c = ax * bx + ay * by
                            if c > 1.0:
                                c = 1.0
                            elif c < -1.0:
                                c = -1.0
                            rhs[ot, o1, o2] += np.arccos(c) * am * bmod[jt, j1, j2]
    return lhs, rhs


def _nullform_conv_numpy(a, b, ua, ub, amod, bmod):
    nc, T, N, _ = a.shape
    lhs = np.zeros((2 * T - 1, 2 * N - 1, 2 * N - 1), dtype=np.complex128)
    rhs = np.zeros((2 * T - 1, 2 * N - 1, 2 * N - 1), dtype=np.float64)
    a_ok = np.any(ua != 0, axis=-1)
    b_ok = np.any(ub != 0, axis=-1)
    a = a * a_ok
    amod = amod * a_ok
    # loop over the second argument's lattice, vectorise over the first
    for j1 in range(N):
        for j2 in range(N):
            if not b_ok[j1, j2]:
                continue
            c = np.clip(ua[..., 0] * ub[j1, j2, 0] + ua[..., 1] * ub[j1, j2, 1], -1.0, 1.0)
            ang = np.arccos(c)
            s1 = slice(N - 1 - j1, 2 * N - 1 - j1)
            s2 = slice(N - 1 - j2, 2 * N - 1 - j2)
            for jt in range(T):
                st = slice(T - 1 - jt, 2 * T - 1 - jt)
                bc0 = np.conj(b[0, jt, j1, j2])
                bc1 = np.conj(b[1, jt, j1, j2])
                lhs[st, s1, s2] += a[0] * bc0 + a[1] * bc1
                rhs[st, s1, s2] += ang * amod * bmod[jt, j1, j2]
    return lhs, rhs


def nullform_convolution(a, b, ua, ub, amod, bmod):
    """Direct lattice sums behind the null-form convolution bound.

    ``a``, ``b``: centred spinor arrays (2, T, N, N) with lattice index
    ``k + n/2``.  ``ua``/``ub``: (N, N, 2) unit vectors of the signed
    frequencies (zero rows mark the excluded xi = 0 mode).  ``amod``/``bmod``:
    (T, N, N) moduli used on the angle-weighted side.

    Returns ``(lhs, rhs)`` on the difference lattice of shape
    (2T-1, 2N-1, 2N-1): ``lhs[k_a - k_b] = sum <a(k_a), b(k_b)>`` and
    ``rhs[k_a - k_b] = sum angle(u_a, u_b) amod(k_a) bmod(k_b)``.
    """
    args = [np.ascontiguousarray(x) for x in (a, b, ua, ub, amod, bmod)]
    if USE_NUMBA:
        return _nullform_conv_numba(*args)
    return _nullform_conv_numpy(*args)


@njit(cache=True)
def _direct_conv2_numba(f, g):
    N = f.shape[-1]
    out = np.zeros((2 * N - 1, 2 * N - 1), dtype=np.complex128)
    for i1 in range(N):
        for i2 in range(N):
            fv = f[i1, i2]
            if fv == 0:
                continue
            for j1 in range(N):
                for j2 in range(N):
                    out[i1 + j1, i2 + j2] += fv * g[j1, j2]
    return out


def _direct_conv2_numpy(f, g):
    N = f.shape[-1]
    out = np.zeros((2 * N - 1, 2 * N - 1), dtype=np.complex128)
    for i1 in range(N):
        for i2 in range(N):
            if f[i1, i2] != 0:
                out[i1:i1 + N, i2:i2 + N] += f[i1, i2] * g
    return out


def direct_convolution2(f, g):
    """Full (non-periodic) 2D convolution of two centred coefficient arrays."""
    f = np.ascontiguousarray(f, dtype=np.complex128)
    g = np.ascontiguousarray(g, dtype=np.complex128)
    if USE_NUMBA:
        return _direct_conv2_numba(f, g)
    return _direct_conv2_numpy(f, g)


@njit(cache=True)
def _spinor_pairing_numba(a, b):
    flat_a0 = a[0].ravel()
    flat_a1 = a[1].ravel()
    flat_b0 = b[0].ravel()
    flat_b1 = b[1].ravel()
    out = np.empty(flat_a0.size, dtype=a.dtype)
    for i in range(flat_a0.size):
        out[i] = flat_a0[i] * np.conj(flat_b0[i]) + flat_a1[i] * np.conj(flat_b1[i])
    return out


def _spinor_pairing_numpy(a, b):
    out = a[0] * np.conj(b[0])
    out += a[1] * np.conj(b[1])
    return out


def spinor_pairing(a, b):
    """Pointwise C^2 inner product a_0 conj(b_0) + a_1 conj(b_1) of spinor arrays.

    Works in complex64 when both inputs are single precision, else complex128.
    """
    dt = np.result_type(a, b, np.complex64)
    a = np.ascontiguousarray(a, dtype=dt)
    b = np.ascontiguousarray(b, dtype=dt)
    if USE_NUMBA:
        return _spinor_pairing_numba(a, b).reshape(a.shape[1:])
    return _spinor_pairing_numpy(a, b)
