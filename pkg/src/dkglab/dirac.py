"""Dirac matrices in 2+1 dimensions, eigenprojections of xi . alpha and the null-form symbol.

All functions accept a single 2-vector or a stack of them with the vector
index last, and return matrices with the 2x2 block in the last two axes.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError

I2 = np.eye(2, dtype=np.complex128)
ALPHA1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
ALPHA2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
BETA = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class DiracMatrices:
    alpha1: np.ndarray
    alpha2: np.ndarray
    beta: np.ndarray

    def anticommutator(self, a, b):
        return a @ b + b @ a


@dataclass(frozen=True)
class SignPair:
    s1: int
    s2: int

    def __post_init__(self):
        if self.s1 not in (1, -1) or self.s2 not in (1, -1):
            raise ValueError(f"signs must be +1 or -1, got ({self.s1}, {self.s2})")

    @classmethod
    def all(cls):
        return [cls(1, 1), cls(1, -1), cls(-1, 1), cls(-1, -1)]

    def label(self):
        return "".join("+" if s > 0 else "-" for s in (self.s1, self.s2))


def dirac_matrices():
    """The representation alpha^1 = sigma_x, alpha^2 = sigma_y, beta = sigma_z."""
    return DiracMatrices(ALPHA1.copy(), ALPHA2.copy(), BETA.copy())


def _sign(sign):
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"sign must be +1/-1, got {sign!r}")


def _vec(xi):
    xi = np.asarray(xi, dtype=np.float64)
    if xi.shape[-1] != 2:
        raise ValueError("expected 2-vectors (last axis of length 2)")
    return xi


def dirac_symbol(xi):
    """xi . alpha; its eigenvalues are +-|xi|."""
    xi = _vec(xi)
    return xi[..., 0, None, None] * ALPHA1 + xi[..., 1, None, None] * ALPHA2


def projection(xi, sign):
    """Pi_sign(xi) = (I + sign * xi/|xi| . alpha) / 2, with Pi_sign(0) := I/2."""
    s = _sign(sign)
    xi = _vec(xi)
    r = np.hypot(xi[..., 0], xi[..., 1])
    safe = np.where(r > 0, r, 1.0)
    unit = np.where((r > 0)[..., None], xi / safe[..., None], 0.0)
    return 0.5 * (I2 + s * dirac_symbol(unit))


def opnorm(m):
    """Largest singular value of 2x2 matrices via the closed form."""
    m = np.asarray(m)
    fro2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    disc = np.maximum(fro2 ** 2 - 4 * np.abs(det) ** 2, 0.0)
    return np.sqrt(np.maximum(0.5 * (fro2 + np.sqrt(disc)), 0.0))


def is_hermitian(m, tol=0.0):
    m = np.asarray(m)
    return bool(np.all(np.abs(m - np.conj(np.swapaxes(m, -1, -2))) <= tol))


def _nonzero(*vectors):
    for v in vectors:
        if np.any(np.hypot(v[..., 0], v[..., 1]) == 0):
            raise DomainError("angle/null-form undefined for a zero vector")


def angle(u, v):
    """Angle in [0, pi] between nonzero 2-vectors."""
    u, v = _vec(u), _vec(v)
    _nonzero(u, v)
    dot = u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]
    cross = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    # atan2 keeps full relative accuracy for nearly (anti)parallel vectors
    return np.arctan2(np.abs(cross), dot)


def nullform_symbol(eta, xi, signs):
    """Pi_{s2}(eta - xi) beta Pi_{s1}(eta) for eta != 0, eta - xi != 0."""
    eta, xi = _vec(eta), _vec(xi)
    diff = eta - xi
    _nonzero(eta, diff)
    return projection(diff, signs.s2) @ BETA @ projection(eta, signs.s1)


def nullform_angle(eta, xi, signs):
    """The angle between s1*eta and s2*(eta - xi) controlling the null form."""
    eta, xi = _vec(eta), _vec(xi)
    return angle(signs.s1 * eta, signs.s2 * (eta - xi))


# -- lattice action -----------------------------------------------------------

def _unit_symbols(grid):
    xi1, xi2 = grid.xi
    r = grid.xi_abs
    safe = np.where(r > 0, r, 1.0)
    em = np.where(r > 0, (xi1 - 1j * xi2) / safe, 0.0)
    ep = np.where(r > 0, (xi1 + 1j * xi2) / safe, 0.0)
    return em, ep


def apply_projection(f, sign):
    """Apply Pi_sign(D) to a Fourier-space spinor field (spatial or space-time)."""
    if not f.fourier:
        raise ContractError("apply_projection expects a Fourier-space spinor field")
    v = f.values
    if v.shape[0] != 2 or v.ndim not in (3, 4):
        raise ContractError("apply_projection needs a spinor field")
    s = _sign(sign)
    em, ep = _unit_symbols(f.grid)
    out = np.empty_like(v)
    out[0] = 0.5 * (v[0] + s * em * v[1])
    out[1] = 0.5 * (s * ep * v[0] + v[1])
    return f.like(out)


def apply_beta(values):
    out = values.copy()
    out[1] = -out[1]
    return out


def apply_dirac_symbol(f):
    """Apply xi . alpha (the symbol of -i alpha . grad) in Fourier space."""
    xi1, xi2 = f.grid.xi
    v = f.values
    out = np.empty_like(v)
    out[0] = (xi1 - 1j * xi2) * v[1]
    out[1] = (xi1 + 1j * xi2) * v[0]
    return f.like(out)
