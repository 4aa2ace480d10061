"""Random X-space fields and alias-free lattice products.

Products of two band-limited space-time fields are formed on a grid with
twice the points per axis and the same periods; the spectrum of the product
then holds the full (non-periodic) lattice convolution without wrap-around.
"""
import numpy as np
import scipy.fft as sfft

from .. import kernels
from ..dirac import _unit_symbols
from ..grid import SpaceTimeField, bracket, continuum_coefficients
from ..norms import lp_sum, modulation, modulus, spatial_weight

SIGN_BRANCH = {1: "plus", -1: "minus"}


def dual(q):
    return np.inf if q == 1 else q / (q - 1.0)


def x_weight(grid, s, b, branch):
    w = spatial_weight(grid, s)[None]
    if b != 0:
        w = w * bracket(modulation(grid, branch)) ** b
    return w


def x_norm(u, s, b, branch, q, weight=None):
    """X^q_{s,b} norm (branch wave) or X^q_{s,b,+-} (plus/minus), any q > 1.

    The sum is an l^{q'} sum with the lattice measure, matching
    :func:`dkglab.norms.xsb_norm` for 1 < q <= 2.  ``weight`` may pass a
    precomputed :func:`x_weight` array.
    """
    g = u.grid
    amp = modulus(continuum_coefficients(u), u.spinor)
    if weight is None:
        weight = x_weight(g, s, b, branch)
    return lp_sum(weight * amp, dual(q), g.dxi * g.dtau)


def random_x_field(grid, s, b, branch, q, rng, spinor=True, noise=None):
    """Complex Gaussian coefficients shaped by <xi>^-s <mod>^-b, unit X^q norm."""
    shape = ((2,) if spinor else ()) + (grid.n_t, grid.n_x, grid.n_x)
    if noise is None:
        noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    u = SpaceTimeField(grid, noise / x_weight(grid, s, b, branch), True)
    nrm = x_norm(u, s, b, branch, q)
    return u.like(u.values / nrm) if nrm > 0 else u


def project(values, grid, sign):
    """Pi_sign(xi) applied to spinor Fourier values (2, n_t, n, n)."""
    em, ep = _unit_symbols(grid)
    out = np.empty_like(values)
    out[0] = 0.5 * (values[0] + sign * em * values[1])
    out[1] = 0.5 * (sign * ep * values[0] + values[1])
    return out


def beta(values):
    out = values.copy()
    out[1] = -out[1]
    return out


def _pad_index(n, m):
    k = np.fft.fftfreq(n, 1.0 / n).astype(int)
    return np.mod(k, m)


def padded_physical(values, grid, factor=2, dtype=np.complex128):
    """Physical samples on the refined grid of the trigonometric interpolant.

    ``values``: unitary space-time Fourier coefficients, last three axes
    (n_t, n, n).  Returns the physical values on the ``factor``-refined grid.
    The inverse transform runs axis by axis and skips the rows that are
    still zero (7/12 of the work of a full padded transform for factor 2).
    ``dtype=np.complex64`` runs the transforms in single precision.
    """
    nt, n = grid.n_t, grid.n_x
    mt, m = nt * factor, n * factor
    lead = values.shape[:-3]
    it, ix = _pad_index(nt, mt), _pad_index(n, m)
    work = np.zeros(lead + (nt, n, m), dtype=dtype)
    work[..., ix] = values
    work = sfft.ifft(work, axis=-1, norm="ortho", overwrite_x=True)
    w2 = np.zeros(lead + (nt, m, m), dtype=dtype)
    w2[..., ix, :] = work
    w2 = sfft.ifft(w2, axis=-2, norm="ortho", overwrite_x=True)
    out = np.zeros(lead + (mt, m, m), dtype=dtype)
    out[..., it, :, :] = w2
    out = sfft.ifft(out, axis=-3, norm="ortho", overwrite_x=True)
    out *= np.sqrt(factor ** 3)
    return out


def spectrum_on(grid, phys):
    """Space-time field on ``grid`` from physical samples (unitary forward DFT).

    The transform runs in the precision of ``phys``; the field stores complex128.
    """
    spec = sfft.fftn(phys, axes=(-3, -2, -1), norm="ortho", overwrite_x=True)
    return SpaceTimeField(grid, spec.astype(np.complex128, copy=False), True)


def spinor_pairing(a_phys, b_phys):
    """Pointwise <a, b> = a_0 conj(b_0) + a_1 conj(b_1)."""
    return kernels.spinor_pairing(a_phys, b_phys)
