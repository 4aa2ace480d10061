"""Pointwise check of the angle-weighted convolution bound for the spinor null form.

For Fourier-space spinor fields psi, psi' the lattice convolution

    LHS(tau, xi) = | sum <beta Pi_s1(eta) psi(lam, eta), Pi_s2(eta - xi) psi'(lam - tau, eta - xi)> |

is compared with

    RHS(tau, xi) = sum angle(s1 eta, s2 (eta - xi)) |psi(lam, eta)| |psi'(lam - tau, eta - xi)|.

Each term obeys |<M x, y>| <= |M| |x| |y| with |M| = sin(angle / 2) <= angle / 2,
so C = 1/2 is a valid constant; the harness reports the empirical one.
"""
import numpy as np

from .. import kernels
from ..dirac import SignPair
from ..errors import ParameterError
from ..grid import GridSpec, SpaceTimeField
from ..report import EstimateReport
from .sampling import SampleConfig
from .xspace import beta, project

MAX_POINTS = 2 ** 14
BOUND = 0.5


def _centred(values):
    return np.fft.fftshift(values, axes=(-3, -2, -1))


def _unit_vectors(grid, sign):
    xi1, xi2 = (np.fft.fftshift(c) for c in grid.xi)
    r = np.hypot(xi1, xi2)
    safe = np.where(r > 0, r, 1.0)
    u = np.stack([xi1 / safe, xi2 / safe], axis=-1) * sign
    u[r == 0] = 0.0
    return u


def nullform_sides(psi, psi_p, signs):
    """(lhs, rhs) on the difference lattice, shape (2 n_t - 1, 2 n - 1, 2 n - 1).

    Index ``(j, i1, i2)`` holds the output frequency with integer wave numbers
    ``(j - n_t + 1, i1 - n + 1, i2 - n + 1)``.  The xi = 0 input modes are left
    out on both sides (the angle is undefined there).
    """
    g = psi.grid
    if psi_p.grid != g:
        raise ParameterError("fields live on different grids")
    if g.n_t * g.n_x ** 2 > MAX_POINTS:
        raise ParameterError(
            f"direct convolution over {g.n_t * g.n_x ** 2} lattice points exceeds the cap {MAX_POINTS}; "
            "use a smaller grid (e.g. n_x = n_t = 16)")
    a = _centred(beta(project(psi.values, g, signs.s1)))
    b = _centred(project(psi_p.values, g, signs.s2))
    amod = np.sqrt(np.sum(np.abs(_centred(psi.values)) ** 2, axis=0))
    bmod = np.sqrt(np.sum(np.abs(_centred(psi_p.values)) ** 2, axis=0))
    lhs, rhs = kernels.nullform_convolution(a, b, _unit_vectors(g, signs.s1), _unit_vectors(g, signs.s2),
                                            amod, bmod)
    return np.abs(lhs), rhs


def pointwise_constant(lhs, rhs, rel_zero=1e-12):
    """(max lhs/rhs over rhs > 0, number of points with rhs = 0 but lhs > 0)."""
    pos = rhs > 0
    c = float(np.max(lhs[pos] / rhs[pos])) if pos.any() else 0.0
    scale = max(float(lhs.max(initial=0.0)), 1e-300)
    bad = int(np.sum(~pos & (lhs > rel_zero * scale)))
    return c, bad


def random_spinor_spacetime(grid, rng):
    shape = (2, grid.n_t, grid.n_x, grid.n_x)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    z[..., 0, 0] = 0.0
    return SpaceTimeField(grid, z, True)


def verify_nullform_13(cfg=None, grid=None, fields=None):
    """Empirical pointwise constant of the angle-weighted bound.

    ``fields``: optional list of (psi, psi') pairs; otherwise ``cfg.count``
    random pairs on ``grid`` (default n_x = n_t = 16).  Passes when every
    lattice point satisfies LHS <= C RHS with the reported C <= 1/2.
    """
    cfg = cfg or SampleConfig(count=3)
    grid = grid or GridSpec(16, n_t=16)
    if fields is None:
        rng = cfg.rng(13)
        fields = [(random_spinor_spacetime(grid, rng), random_spinor_spacetime(grid, rng))
                  for _ in range(cfg.count)]
    table, C, violations, points = [], 0.0, 0, 0
    for i, (psi, psi_p) in enumerate(fields):
        for p in SignPair.all():
            lhs, rhs = nullform_sides(psi, psi_p, p)
            c, bad = pointwise_constant(lhs, rhs)
            C = max(C, c)
            violations += bad
            points += lhs.size
            table.append({"sample": i, "signs": p.label(), "constant": c, "zero_rhs_violations": bad})
    g = fields[0][0].grid if fields else grid
    per_sample = [max(row["constant"] for row in table if row["sample"] == i) for i in range(len(fields))]
    return EstimateReport(
        operation="verify_nullform_13",
        parameters={"bound": BOUND, "backend": "numba" if kernels.USE_NUMBA else "numpy"},
        seed=cfg.seed,
        count=len(fields),
        grid=g.as_dict(),
        constants={"C": C, "max_ratio": C, "min_ratio": min(per_sample) if per_sample else 0.0,
                   "lattice_points": points, "trend": per_sample},
        skipped=violations,
        passed=bool(violations == 0 and C <= BOUND * (1 + 1e-12)),
        table=table,
    )
