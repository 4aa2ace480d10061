"""Periodic lattices, lattice fields and the unitary DFT they are built on.

Conventions used throughout the package:

* Space is the torus ``[0, L)^2`` sampled at ``n_x`` points per axis, time
  (for space-time fields) the periodic window ``[0, T)`` at ``n_t`` points.
* Angular frequencies are ``2 pi k / L`` (space) and ``2 pi k / T`` (time)
  with ``k = -n/2 .. n/2 - 1`` stored in FFT order.
* The transform is ``f_hat(tau, xi) ~ sum f(t, x) exp(-i (t tau + x . xi))``
  with unitary normalisation, so Parseval holds literally.  A free wave
  ``exp(-i t |D|) f`` is then supported on ``tau = -|xi|``.
* Arrays are row-major over ``(t, x1, x2)``; spinor fields carry the
  component index as the leading axis, ``(2, [n_t,] n_x, n_x)``.
"""
import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import ContractError, ParameterError

__all__ = [
    "GridSpec",
    "ScalarField",
    "SpinorField",
    "SpaceTimeField",
    "bracket",
    "dft_forward",
    "dft_inverse",
    "apply_multiplier",
    "continuum_coefficients",
    "save_field",
    "load_field",
]

MAGIC = b"DKGF"
VERSION = 1
_HEADER = struct.Struct("<4sIBIIddB")
KIND_SCALAR, KIND_SPINOR, KIND_SPACETIME = 0, 1, 2


def bracket(x):
    """Japanese bracket <x> = (1 + |x|^2)^(1/2)."""
    return np.sqrt(1.0 + np.abs(x) ** 2)


@dataclass(frozen=True)
class GridSpec:
    """Square periodic lattice in space, optionally with a periodic time axis."""

    n_x: int
    period_L: float = 2 * np.pi
    n_t: int = 1
    window_T: float = 2 * np.pi

    def __post_init__(self):
        if int(self.n_x) != self.n_x or self.n_x < 8 or self.n_x % 2:
            raise ParameterError(f"n_x must be an even integer >= 8, got {self.n_x}")
        if int(self.n_t) != self.n_t or self.n_t < 1:
            raise ParameterError(f"n_t must be a positive integer, got {self.n_t}")
        if not self.period_L > 0:
            raise ParameterError(f"period_L must be positive, got {self.period_L}")
        if self.n_t > 1 and not self.window_T > 0:
            raise ParameterError(f"window_T must be positive, got {self.window_T}")
        object.__setattr__(self, "n_x", int(self.n_x))
        object.__setattr__(self, "n_t", int(self.n_t))
        object.__setattr__(self, "period_L", float(self.period_L))
        object.__setattr__(self, "window_T", float(self.window_T))

    # -- lattice geometry ------------------------------------------------
    @property
    def dx(self):
        return self.period_L / self.n_x

    @property
    def dt(self):
        return self.window_T / self.n_t

    @property
    def dxi(self):
        """Cell measure of the spatial frequency lattice, (2 pi / L)^2."""
        return (2 * np.pi / self.period_L) ** 2

    @property
    def dtau(self):
        return 2 * np.pi / self.window_T

    @cached_property
    def k(self):
        """Integer wave numbers in FFT order."""
        return np.fft.fftfreq(self.n_x, 1.0 / self.n_x)

    @cached_property
    def kt(self):
        return np.fft.fftfreq(self.n_t, 1.0 / self.n_t)

    @cached_property
    def xi(self):
        """Spatial frequency components, a pair of (n_x, n_x) arrays."""
        k = 2 * np.pi / self.period_L * self.k
        return np.meshgrid(k, k, indexing="ij")

    @cached_property
    def xi_abs(self):
        xi1, xi2 = self.xi
        return np.hypot(xi1, xi2)

    @cached_property
    def tau(self):
        """Temporal frequencies shaped (n_t, 1, 1) for broadcasting."""
        return (self.dtau * self.kt)[:, None, None]

    @cached_property
    def x(self):
        x = self.dx * np.arange(self.n_x)
        return np.meshgrid(x, x, indexing="ij")

    @cached_property
    def t(self):
        return self.dt * np.arange(self.n_t)

    @cached_property
    def dealias_mask(self):
        """2/3-rule mask: keep modes with |k_j| < n_x / 3 on both axes."""
        keep = np.abs(self.k) < self.n_x / 3.0
        return keep[:, None] & keep[None, :]

    def spatial(self):
        """The purely spatial grid with the same spatial lattice."""
        return GridSpec(self.n_x, self.period_L)

    def with_time(self, n_t, window_T):
        return GridSpec(self.n_x, self.period_L, n_t, window_T)

    def padded(self, factor=2):
        """Same periods, ``factor`` times more points (for alias-free products)."""
        n_t = self.n_t * factor if self.n_t > 1 else 1
        return GridSpec(self.n_x * factor, self.period_L, n_t, self.window_T)

    def scaled(self, lam):
        """Grid of period L / lam; same samples represent f(lam x)."""
        return GridSpec(self.n_x, self.period_L / lam, self.n_t, self.window_T)

    def spatial_scale(self):
        """Factor turning unitary spatial DFT coefficients into continuum transforms."""
        return self.period_L ** 2 / self.n_x

    def spacetime_scale(self):
        return self.window_T * self.period_L ** 2 / (np.sqrt(self.n_t) * self.n_x)

    def as_dict(self):
        return {"n_x": self.n_x, "period_L": self.period_L, "n_t": self.n_t, "window_T": self.window_T}


# -- fields ------------------------------------------------------------------

@dataclass(eq=False)
class _Field:
    grid: GridSpec
    values: np.ndarray
    fourier: bool = False
    kind_code = -1

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape not in self._allowed_shapes():
            raise ContractError(
                f"{type(self).__name__} on n_x={self.grid.n_x}, n_t={self.grid.n_t} "
                f"cannot hold values of shape {self.values.shape}"
            )

    def _allowed_shapes(self):
        raise NotImplementedError

    @property
    def ndim_transform(self):
        return 2

    def copy(self):
        return type(self)(self.grid, self.values.copy(), self.fourier)

    def like(self, values, fourier=None):
        return type(self)(self.grid, values, self.fourier if fourier is None else fourier)

    def to_fourier(self):
        return self if self.fourier else dft_forward(self)

    def to_physical(self):
        return dft_inverse(self) if self.fourier else self

    def __add__(self, other):
        _check_compatible(self, other)
        return self.like(self.values + other.values)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.like(self.values - other.values)

    def __mul__(self, c):
        return self.like(self.values * c)

    __rmul__ = __mul__

    def l2(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))


class ScalarField(_Field):
    """Complex (or real) scalar lattice function on the spatial grid."""

    kind_code = KIND_SCALAR

    def _allowed_shapes(self):
        n = self.grid.n_x
        return [(n, n)]


class SpinorField(_Field):
    """Two-spinor lattice function, values shaped (2, n_x, n_x)."""

    kind_code = KIND_SPINOR

    def _allowed_shapes(self):
        n = self.grid.n_x
        return [(2, n, n)]


class SpaceTimeField(_Field):
    """Scalar (n_t, n, n) or spinor (2, n_t, n, n) function on the space-time lattice."""

    kind_code = KIND_SPACETIME

    def _allowed_shapes(self):
        g = self.grid
        return [(g.n_t, g.n_x, g.n_x), (2, g.n_t, g.n_x, g.n_x)]

    @property
    def spinor(self):
        return self.values.ndim == 4

    @property
    def ndim_transform(self):
        return 3

    def at_time(self, j):
        """Spatial slice j (in the current spatial representation)."""
        cls = SpinorField if self.spinor else ScalarField
        v = self.values[:, j] if self.spinor else self.values[j]
        return cls(self.grid.spatial(), v, self.fourier)


def _check_compatible(a, b):
    if type(a) is not type(b) or a.grid != b.grid or a.fourier != b.fourier:
        raise ContractError("fields differ in kind, grid or representation")


def _axes(f):
    return tuple(range(-f.ndim_transform, 0))


def dft_forward(f):
    """Unitary DFT over the lattice axes; requires physical representation."""
    if f.fourier:
        raise ContractError(f"dft_forward expects a physical-space {type(f).__name__}")
    return f.like(sfft.fftn(f.values, axes=_axes(f), norm="ortho"), fourier=True)


def dft_inverse(f):
    """Inverse of :func:`dft_forward`; requires Fourier representation."""
    if not f.fourier:
        raise ContractError(f"dft_inverse expects a Fourier-space {type(f).__name__}")
    return f.like(sfft.ifftn(f.values, axes=_axes(f), norm="ortho"), fourier=False)


def _symbol_values(f, symbol):
    g = f.grid
    if callable(symbol):
        xi1, xi2 = g.xi
        if isinstance(f, SpaceTimeField):
            vals = symbol(g.tau, xi1[None], xi2[None])
        else:
            vals = symbol(xi1, xi2)
    else:
        vals = symbol
    return np.broadcast_to(np.asarray(vals), f.values.shape[-f.ndim_transform:])


def apply_multiplier(f, symbol):
    """Multiply Fourier coefficients pointwise by ``symbol``.

    ``symbol`` is an array broadcastable to the lattice, or a callable taking
    ``(xi1, xi2)`` for spatial fields and ``(tau, xi1, xi2)`` for space-time
    fields.  Spinor components are multiplied by the same scalar symbol.
    """
    if not f.fourier:
        raise ContractError("apply_multiplier expects a Fourier-space field")
    vals = _symbol_values(f, symbol)
    bad = ~np.isfinite(vals)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        g = f.grid
        where = f"k={idx[-2:]}, xi=({g.xi[0][idx[-2:]]:.6g}, {g.xi[1][idx[-2:]]:.6g})"
        if len(idx) == 3:
            where = f"tau={g.tau[idx[0], 0, 0]:.6g}, " + where
        raise ParameterError(f"symbol is not finite at lattice point {where}")
    return f.like(f.values * vals)


def continuum_coefficients(f):
    """Fourier coefficients scaled to approximate the continuum transform.

    For band-limited periodic data these are exactly the torus Fourier
    integrals; all norms in :mod:`dkglab.norms` are computed from them.
    """
    if not f.fourier:
        raise ContractError("continuum_coefficients expects a Fourier-space field")
    g = f.grid
    scale = g.spacetime_scale() if isinstance(f, SpaceTimeField) else g.spatial_scale()
    return f.values * scale


def from_continuum(grid, coeffs, cls=ScalarField):
    """Build a Fourier-space field whose continuum coefficients are ``coeffs``."""
    scale = grid.spacetime_scale() if cls is SpaceTimeField else grid.spatial_scale()
    return cls(grid, np.asarray(coeffs, dtype=np.complex128) / scale, True)


# -- serialization -----------------------------------------------------------

def field_to_bytes(f):
    g = f.grid
    header = _HEADER.pack(MAGIC, VERSION, f.kind_code, g.n_x, g.n_t, g.period_L, g.window_T, int(f.fourier))
    payload = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    return header + payload


def field_from_bytes(buf):
    if len(buf) < _HEADER.size:
        raise ContractError("truncated DKGF container")
    magic, version, kind, n_x, n_t, L, T, rep = _HEADER.unpack_from(buf)
    if magic != MAGIC or version != VERSION:
        raise ContractError(f"not a DKGF v{VERSION} container")
    grid = GridSpec(n_x, L, n_t, T)
    data = np.frombuffer(buf, dtype="<c16", offset=_HEADER.size).astype(np.complex128)
    if kind == KIND_SCALAR:
        return ScalarField(grid, data.reshape(n_x, n_x), bool(rep))
    if kind == KIND_SPINOR:
        return SpinorField(grid, data.reshape(2, n_x, n_x), bool(rep))
    if kind == KIND_SPACETIME:
        ncomp = data.size // (n_t * n_x * n_x)
        shape = (n_t, n_x, n_x) if ncomp == 1 else (ncomp, n_t, n_x, n_x)
        return SpaceTimeField(grid, data.reshape(shape), bool(rep))
    raise ContractError(f"unknown field kind {kind}")


def save_field(path, f):
    with open(path, "wb") as fh:
        fh.write(field_to_bytes(f))


def load_field(path):
    with open(path, "rb") as fh:
        return field_from_bytes(fh.read())
