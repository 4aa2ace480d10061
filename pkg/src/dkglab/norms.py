"""Fourier-Lebesgue norms and Bourgain-type X^r_{s,b} norms on lattices.

Every norm here is a weighted l^{r'} sum over the frequency lattice of
continuum-scaled coefficients (see :func:`dkglab.grid.continuum_coefficients`),
including the cell measure, so lattice values converge to continuum values.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .grid import (
    ScalarField,
    SpaceTimeField,
    SpinorField,
    bracket,
    continuum_coefficients,
    dft_forward,
)
from .report import EstimateReport

BRANCHES = ("none", "plus", "minus", "wave")


class ZeroModeWarning(UserWarning):
    """The xi = 0 mode excluded from a homogeneous norm carried non-negligible mass."""


@dataclass(frozen=True)
class NormSpec:
    s: float
    r: float = 2.0
    b: float = 0.0
    branch: str = "none"
    homogeneous: bool = False

    def __post_init__(self):
        if not (1.0 < self.r <= 2.0):
            raise ParameterError(f"Lebesgue index r must lie in (1, 2], got {self.r}")
        if self.branch not in BRANCHES:
            raise ParameterError(f"branch must be one of {BRANCHES}, got {self.branch!r}")

    @property
    def r_dual(self):
        return self.r / (self.r - 1.0)

    def as_dict(self):
        return {"s": self.s, "r": self.r, "b": self.b, "branch": self.branch, "homogeneous": self.homogeneous}


def lp_sum(a, p, measure=1.0):
    """(sum |a|^p * measure)^(1/p), scaled by max|a| to survive large p.

    For large p, entries below ``(1e-17 / size)^(1/p) * max`` are dropped:
    together they change the sum by less than 1e-17 relative.
    """
    a = np.abs(np.asarray(a, dtype=np.float64))
    m = a.max(initial=0.0)
    if m == 0.0:
        return 0.0
    if math.isinf(p):
        return float(m)
    cut = (1e-17 / a.size) ** (1.0 / p)
    if cut > 1e-3:
        a = a[a > cut * m]
    return float(m * (np.sum((a / m) ** p) * measure) ** (1.0 / p))


def modulus(values, spinor):
    """Pointwise C^2 modulus for spinor arrays, absolute value otherwise."""
    if spinor:
        return np.sqrt(np.abs(values[0]) ** 2 + np.abs(values[1]) ** 2)
    return np.abs(values)


def _is_spinor(f):
    return isinstance(f, SpinorField) or (isinstance(f, SpaceTimeField) and f.spinor)


def spatial_weight(grid, s, homogeneous=False):
    if homogeneous:
        r = grid.xi_abs
        w = np.zeros_like(r)
        nz = r > 0
        w[nz] = r[nz] ** s
        return w
    return bracket(grid.xi_abs) ** s


def modulation(grid, branch):
    """tau +- |xi| for branch plus/minus, |tau| - |xi| for branch wave."""
    tau, r = grid.tau, grid.xi_abs[None]
    if branch == "plus":
        return tau + r
    if branch == "minus":
        return tau - r
    if branch == "wave":
        return np.abs(tau) - r
    raise ParameterError(f"branch {branch!r} has no modulation")


def xsb_weight(grid, spec):
    w = spatial_weight(grid, spec.s)[None]
    if spec.b != 0:
        w = w * bracket(modulation(grid, spec.branch)) ** spec.b
    return w


def zero_mode_fraction(f):
    """Share of the l^2 mass sitting at xi = 0 (Fourier-space field)."""
    amp = modulus(f.values, _is_spinor(f))
    total = np.sum(amp ** 2)
    if total == 0:
        return 0.0
    zero = amp[..., 0, 0]
    return float(np.sum(zero ** 2) / total)


def fourier_lebesgue_norm(f, spec):
    """||<xi>^s f_hat||_{l^{r'}} with lattice measure (|xi|^s when homogeneous)."""
    if isinstance(f, SpaceTimeField):
        raise ContractError("fourier_lebesgue_norm takes a spatial field")
    if not f.fourier:
        raise ContractError("fourier_lebesgue_norm expects a Fourier-space field")
    if spec.branch != "none":
        raise ParameterError("fourier_lebesgue_norm needs branch='none'")
    amp = modulus(continuum_coefficients(f), _is_spinor(f))
    if spec.homogeneous:
        frac = zero_mode_fraction(f)
        if frac > 1e-12:
            warnings.warn(f"homogeneous norm excludes xi=0 carrying {frac:.3g} of the mass", ZeroModeWarning, stacklevel=2)
    w = spatial_weight(f.grid, spec.s, spec.homogeneous)
    return lp_sum(w * amp, spec.r_dual, f.grid.dxi)


def xsb_norm(u, spec):
    """X^r_{s,b,+-} (branch plus/minus) or X^r_{s,b} (branch wave) norm."""
    if not isinstance(u, SpaceTimeField) or u.grid.n_t < 2:
        raise ContractError("xsb_norm needs a space-time field with n_t > 1")
    if not u.fourier:
        raise ContractError("xsb_norm expects a Fourier-space field")
    if spec.branch == "none":
        raise ParameterError("xsb_norm needs branch plus, minus or wave")
    g = u.grid
    amp = modulus(continuum_coefficients(u), u.spinor)
    return lp_sum(xsb_weight(g, spec) * amp, spec.r_dual, g.dxi * g.dtau)


def time_cutoff(grid, T_sub):
    """Smooth cutoff on the periodic time lattice.

    Equal to 1 on [0, T_sub], raised-cosine flanks of width T_sub/4 on either
    side (the left flank wraps to the end of the window), 0 elsewhere.
    """
    W = grid.window_T
    t = grid.t
    if T_sub >= W:
        return np.ones_like(t)
    width = T_sub / 4.0

    def flank(d):
        return np.where((d >= 0) & (d <= width), 0.5 * (1 + np.cos(np.pi * np.clip(d, 0, width) / width)), 0.0)

    inside = t <= T_sub * (1 + 1e-12)
    chi = np.maximum(flank(t - T_sub), flank(W - t))
    return np.where(inside, 1.0, chi)


def restriction_norm(u, T_sub, spec):
    """Upper bound for the X norm restricted to [0, T_sub].

    The infimum over extensions is bounded from above by the norm of the
    given field multiplied by :func:`time_cutoff`.
    """
    g = u.grid
    if not (0 < T_sub <= g.window_T * (1 + 1e-12)):
        raise ParameterError(f"T_sub must lie in (0, {g.window_T}], got {T_sub}")
    phys = u.to_physical()
    chi = time_cutoff(g, T_sub)[:, None, None]
    cut = phys.like(phys.values * chi)
    return xsb_norm(dft_forward(cut), spec)


def continuity_check(u_plus, u_minus, spec):
    """Modulus of continuity of t -> u(t) in H^{s,r} for u = u_+ + u_-.

    Returns the table of ||u(t_{j+1}) - u(t_j)|| for adjacent lattice times.
    """
    if not spec.b > 1.0 / spec.r:
        raise ParameterError(f"continuity needs b > 1/r, got b={spec.b}, r={spec.r}")
    u = u_plus.to_physical() + u_minus.to_physical()
    g = u.grid
    spatial = NormSpec(spec.s, spec.r)
    norms = []
    table = []
    for j in range(g.n_t - 1):
        diff = u.at_time(j + 1) - u.at_time(j)
        val = fourier_lebesgue_norm(dft_forward(diff), spatial)
        norms.append(val)
        table.append({"t": float(g.t[j]), "dt": float(g.dt), "increment": val})
    norms = np.asarray(norms)
    return EstimateReport(
        operation="continuity_check",
        parameters=spec.as_dict(),
        grid=g.as_dict(),
        count=len(norms),
        constants={
            "max_increment": float(norms.max(initial=0.0)),
            "max_increment_per_dt": float(norms.max(initial=0.0) / g.dt),
        },
        table=table,
    )
