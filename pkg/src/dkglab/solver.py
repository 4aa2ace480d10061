"""Pseudospectral evolution of the Dirac-Klein-Gordon system in half-wave form.

Unknowns are psi_+-, the projections of the spinor onto the +-|xi|
eigenspaces of xi . alpha, and phi_+- = phi +- i A^{-1/2} d_t phi with
A = 1 - Laplacian.  With psi = psi_+ + psi_- and phi = (phi_+ + phi_-)/2
the system reads

    (-i d_t +- |D|) psi_+-   = M beta psi_-+ + Pi_+-(D)(phi beta psi)
    (i d_t -+ A^{1/2}) phi_+- = -+ A^{-1/2} <beta psi, psi> -+ A^{-1/2} (m + 1) phi

which is equivalent to

    i (d_t + alpha . grad) psi + M beta psi = -phi beta psi
    (-d_t^2 + Laplacian) phi + m phi = -<beta psi, psi>.

Quadratic terms are formed in physical space with 2/3-rule dealiasing and
are multiplied by ``PhysicsParams.coupling`` (0 switches them off).
"""
import csv
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft as sfft

from . import dirac
from .errors import BlowUpError, ContractError, ParameterError
from .grid import GridSpec, ScalarField, SpaceTimeField, SpinorField, bracket, dft_forward
from .norms import NormSpec, fourier_lebesgue_norm, restriction_norm

MODES = ("exponential_step", "picard")


@dataclass(frozen=True)
class PhysicsParams:
    M: float = 0.0
    m: float = 0.0
    coupling: float = 1.0

    def __post_init__(self):
        for name in ("M", "m", "coupling"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-3
    steps: int = 100
    picard_iters: int = 30
    tol: float = 1e-10
    mode: str = "exponential_step"
    dealias: bool = True
    save_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ParameterError("dt must be positive")
        if not self.tol > 0:
            raise ParameterError("tol must be positive")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}")
        if self.steps < 0 or self.save_every < 1:
            raise ParameterError("steps >= 0 and save_every >= 1 required")


@dataclass
class DKGState:
    """Split quadruple in Fourier representation (unitary coefficients)."""

    psi_plus: SpinorField
    psi_minus: SpinorField
    phi_plus: ScalarField
    phi_minus: ScalarField
    time: float = 0.0

    @property
    def grid(self):
        return self.psi_plus.grid

    def arrays(self):
        return (self.psi_plus.values, self.psi_minus.values, self.phi_plus.values, self.phi_minus.values)

    @classmethod
    def from_arrays(cls, grid, arrays, time=0.0):
        pp, pm, fp, fm = arrays
        return cls(SpinorField(grid, pp, True), SpinorField(grid, pm, True),
                   ScalarField(grid, fp, True), ScalarField(grid, fm, True), time)

    def projection_leakage(self):
        """Relative mass of psi_+- outside the range of Pi_+-(D), zero mode exempt."""
        out = 0.0
        for f, sign in ((self.psi_plus, -1), (self.psi_minus, 1)):
            wrong = dirac.apply_projection(f, sign).values.copy()
            wrong[:, 0, 0] = 0
            total = np.sum(np.abs(f.values) ** 2)
            if total > 0:
                out = max(out, float(np.sqrt(np.sum(np.abs(wrong) ** 2) / total)))
        return out


class _Operators:
    """Lattice symbols and the split nonlinearity for one grid."""

    def __init__(self, grid, params, dealias=True):
        self.grid = grid
        self.params = params
        self.absxi = grid.xi_abs
        self.jxi = bracket(grid.xi_abs)
        self.mask = grid.dealias_mask if dealias else np.ones((grid.n_x, grid.n_x), bool)
        self.em, self.ep = dirac._unit_symbols(grid)
        # generator of the linear flow for (psi_+, psi_-, phi_+, phi_-)
        self.lam = (-1j * self.absxi, 1j * self.absxi, -1j * self.jxi, 1j * self.jxi)

    def flow(self, arrays, h):
        return tuple(a * np.exp(h * l) for a, l in zip(arrays, self.lam))

    def project(self, v, s):
        out = np.empty_like(v)
        out[0] = 0.5 * (v[0] + s * self.em * v[1])
        out[1] = 0.5 * (s * self.ep * v[0] + v[1])
        return out

    def products(self, psi_hat, phi_hat):
        """Dealiased phi*beta*psi and <beta psi, psi> in Fourier space."""
        mask = self.mask
        psi = sfft.ifft2(psi_hat * mask, norm="ortho")
        phi = sfft.ifft2(phi_hat * mask, norm="ortho")
        fbp = np.empty_like(psi)
        fbp[0] = phi * psi[0]
        fbp[1] = -phi * psi[1]
        bpp = np.abs(psi[0]) ** 2 - np.abs(psi[1]) ** 2
        fbp_hat = sfft.fft2(fbp, norm="ortho") * mask
        bpp_hat = sfft.fft2(bpp, norm="ortho") * mask
        return fbp_hat, bpp_hat

    def forcing(self, arrays):
        """Right-hand sides F_+, F_-, G_+, G_- of the split equations."""
        pp, pm, fp, fm = arrays
        p = self.params
        psi_hat = pp + pm
        phi_hat = 0.5 * (fp + fm)
        if p.coupling != 0:
            fbp, bpp = self.products(psi_hat, phi_hat)
        else:
            fbp = np.zeros_like(psi_hat)
            bpp = np.zeros_like(phi_hat)
        F = []
        for s, other in ((1, pm), (-1, pp)):
            f = p.coupling * self.project(fbp, s)
            if p.M != 0:
                f = f + p.M * dirac.apply_beta(other)
            F.append(f)
        kg = (p.coupling * bpp + (p.m + 1.0) * phi_hat) / self.jxi
        return F[0], F[1], -kg, kg

    def nonlinear(self, arrays):
        """N(u) such that d_t u = Lambda u + N(u)."""
        Fp, Fm, Gp, Gm = self.forcing(arrays)
        return 1j * Fp, 1j * Fm, -1j * Gp, -1j * Gm

    def step(self, arrays, dt):
        """Integrating-factor explicit midpoint step (second order)."""
        # overflow is reported by the callers' finiteness check
        with np.errstate(over="ignore", invalid="ignore"):
            n0 = self.nonlinear(arrays)
            half = self.flow(tuple(a + 0.5 * dt * n for a, n in zip(arrays, n0)), 0.5 * dt)
            n1 = self.flow(self.nonlinear(half), 0.5 * dt)
            full = self.flow(arrays, dt)
            return tuple(a + dt * n for a, n in zip(full, n1))


def _fourier(f):
    return f if f.fourier else dft_forward(f)


def _check_real(f, name):
    phys = f.to_physical().values
    scale = max(np.max(np.abs(phys)), 1.0)
    if np.max(np.abs(phys.imag)) > 1e-10 * scale:
        raise ContractError(f"{name} must be real-valued")


def split_data(psi0, phi0, phi1):
    """Transform (psi0, phi0, phi1) into the split state at t = 0."""
    grid = psi0.grid
    if phi0.grid != grid or phi1.grid != grid:
        raise ContractError("psi0, phi0 and phi1 must live on the same grid")
    _check_real(phi0, "phi0")
    _check_real(phi1, "phi1")
    psi_hat = _fourier(psi0)
    f0 = _fourier(phi0).values
    f1 = _fourier(phi1).values / bracket(grid.xi_abs)
    return DKGState(
        dirac.apply_projection(psi_hat, 1),
        dirac.apply_projection(psi_hat, -1),
        ScalarField(grid, f0 + 1j * f1, True),
        ScalarField(grid, f0 - 1j * f1, True),
    )


def reassemble(state):
    """Recover physical (psi, phi, d_t phi) from a split state."""
    g = state.grid
    psi = SpinorField(g, state.psi_plus.values + state.psi_minus.values, True)
    phi = ScalarField(g, 0.5 * (state.phi_plus.values + state.phi_minus.values), True)
    dtphi = ScalarField(g, bracket(g.xi_abs) * (state.phi_plus.values - state.phi_minus.values) / 2j, True)
    return psi.to_physical(), phi.to_physical(), dtphi.to_physical()


def _sign(sign):
    return dirac._sign(sign)


def rhs_dirac(state, params, sign, dealias=True):
    """Right-hand side of (-i d_t +- |D|) psi_+- as a Fourier-space spinor field."""
    ops = _Operators(state.grid, params, dealias)
    F = ops.forcing(state.arrays())
    return SpinorField(state.grid, F[0] if _sign(sign) > 0 else F[1], True)


def rhs_kg(state, params, sign, dealias=True):
    """Right-hand side of (i d_t -+ A^{1/2}) phi_+- as a Fourier-space scalar field."""
    ops = _Operators(state.grid, params, dealias)
    F = ops.forcing(state.arrays())
    return ScalarField(state.grid, F[2] if _sign(sign) > 0 else F[3], True)


def _finite(arrays):
    return all(np.isfinite(a).all() for a in arrays)


def step_exponential(state, params, config):
    """Advance one step of size ``config.dt``."""
    if config.mode != "exponential_step":
        raise ParameterError("step_exponential requires mode='exponential_step'")
    ops = _Operators(state.grid, params, config.dealias)
    new = ops.step(state.arrays(), config.dt)
    t = state.time + config.dt
    if not _finite(new):
        raise BlowUpError(t)
    return DKGState.from_arrays(state.grid, new, t)


def charge(psi_plus, psi_minus):
    """Spatial L^2 norm of psi_+ + psi_-, lattice measure included."""
    a, b = psi_plus, psi_minus
    if a.fourier != b.fourier:
        a, b = _fourier(a), _fourier(b)
    v = a.values + b.values
    return float(a.grid.dx * np.sqrt(np.sum(np.abs(v) ** 2)))


@dataclass
class Trajectory:
    """Physical-space snapshots (psi, phi, d_t phi) at uniformly spaced times."""

    grid: GridSpec
    times: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    dtphi: np.ndarray
    states: list = field(default_factory=list, repr=False)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def spacetime(self, which):
        """Snapshots of one quantity as a physical-space SpaceTimeField container."""
        vals = {"psi": self.psi, "phi": self.phi, "dtphi": self.dtphi}[which]
        if which == "psi":
            vals = np.moveaxis(vals, 1, 0)
        K = len(self.times)
        window = self.dt * K if K > 1 else 1.0
        g = GridSpec(self.grid.n_x, self.grid.period_L, K, window)
        return SpaceTimeField(g, vals, False)


def evolve(state, params, config, keep_states=False, monitor=None):
    """Run ``config.steps`` exponential steps and return the saved trajectory.

    ``monitor(state)`` is called on every saved state; use it to collect time
    series without storing all snapshots.
    """
    ops = _Operators(state.grid, params, config.dealias)
    arrays = state.arrays()
    t0 = state.time
    snaps, times, states = [], [], []

    def save(arr, t):
        st = DKGState.from_arrays(state.grid, arr, t)
        psi, phi, dtphi = reassemble(st)
        snaps.append((psi.values, phi.values, dtphi.values))
        times.append(t)
        if keep_states:
            states.append(st)
        if monitor is not None:
            monitor(st)

    save(arrays, t0)
    for n in range(1, config.steps + 1):
        arrays = ops.step(arrays, config.dt)
        t = t0 + n * config.dt
        if not _finite(arrays):
            raise BlowUpError(t)
        if n % config.save_every == 0 or n == config.steps:
            save(arrays, t)
    psi, phi, dtphi = (np.array(x) for x in zip(*snaps))
    return Trajectory(state.grid, np.array(times), psi, phi, dtphi, states)


def final_state(state, params, config):
    """State after ``config.steps`` steps without storing snapshots."""
    ops = _Operators(state.grid, params, config.dealias)
    arrays = state.arrays()
    for n in range(1, config.steps + 1):
        arrays = ops.step(arrays, config.dt)
        if not _finite(arrays):
            raise BlowUpError(state.time + n * config.dt)
    return DKGState.from_arrays(state.grid, arrays, state.time + config.steps * config.dt)


# -- Picard iteration ----------------------------------------------------------

@dataclass
class PicardResult:
    times: np.ndarray
    iterate: tuple
    differences: list
    ratios: list
    converged: bool
    diverged: bool
    grid: GridSpec
    T_local: float

    @property
    def iterations(self):
        return len(self.differences)

    def state_at(self, t):
        """The last iterate at the sample time closest to ``t``."""
        k = int(np.argmin(np.abs(self.times - t)))
        return DKGState.from_arrays(self.grid, tuple(a[k] for a in self.iterate), float(self.times[k]))


def _cumtrapz_from(w, h, k0):
    """Cumulative trapezoid of samples w (axis 0) measured from index k0."""
    out = np.zeros_like(w)
    incr = 0.5 * h * (w[1:] + w[:-1])
    if k0 + 1 < len(w):
        out[k0 + 1:] = np.cumsum(incr[k0:], axis=0)
    if k0 > 0:
        out[:k0] = -np.cumsum(incr[:k0][::-1], axis=0)[::-1]
    return out


def _difference_norm(grid, times, k0, n_t, diff, T_local, spec):
    """Sum over components of restriction norms of a Picard difference."""
    window = grid.with_time(n_t, 2 * T_local)
    total = 0.0
    for comp, branch in zip(diff, ("plus", "minus", "plus", "minus")):
        periodic = np.roll(comp, -k0, axis=0)
        if periodic.ndim == 4:
            periodic = np.moveaxis(periodic, 1, 0)
        phys = sfft.ifft2(periodic, norm="ortho")
        u = SpaceTimeField(window, phys, False)
        total += restriction_norm(u, T_local, replace(spec, branch=branch))
    return total


def picard_iterate(state0, params, T_local, iters=30, tol=1e-10, n_t=64, norm_spec=None,
                   dealias=True):
    """Picard iteration of the Duhamel formula on a window around [0, T_local].

    Iterates live on the uniform times s in [-T_local/2, 3 T_local/2) so that
    the restriction norm's cutoff (flanks of width T_local/4) sees a genuine
    extension.  Duhamel integrals use the trapezoidal rule on these samples.
    Cauchy differences are measured in the sum of X^r_{s,b,+-}[0, T_local]
    restriction norms (upper bounds) of the four components.
    """
    if n_t % 4:
        raise ParameterError("n_t must be divisible by 4")
    if not T_local > 0:
        raise ParameterError("T_local must be positive")
    spec = norm_spec or NormSpec(0.0, 2.0, 0.51, "plus")
    grid = state0.grid
    ops = _Operators(grid, params, dealias)
    h = 2.0 * T_local / n_t
    k0 = n_t // 4
    times = (np.arange(n_t) - k0) * h
    u0 = state0.arrays()

    def phases(sign):
        return [np.exp(sign * times.reshape((-1,) + (1,) * l.ndim) * l) for l in ops.lam]

    fwd, back = phases(1), phases(-1)
    current = tuple(_bcast(ph, a[None]) for a, ph in zip(u0, fwd))
    diffs, ratios = [], []
    converged = diverged = False
    growth = 0
    for _ in range(iters):
        N = [np.empty_like(c) for c in current]
        for k in range(n_t):
            nk = ops.nonlinear(tuple(c[k] for c in current))
            for c, v in zip(N, nk):
                c[k] = v
        new = []
        for a, n, fph, bph in zip(u0, N, fwd, back):
            w = _bcast(bph, n)
            acc = _cumtrapz_from(w, h, k0)
            new.append(_bcast(fph, a[None] + acc))
        new = tuple(new)
        if not _finite(new):
            diverged = True
            break
        diff = tuple(a - b for a, b in zip(new, current))
        d = _difference_norm(grid, times, k0, n_t, diff, T_local, spec)
        if diffs:
            ratios.append(d / diffs[-1] if diffs[-1] > 0 else 0.0)
            growth = growth + 1 if d > diffs[-1] else 0
        diffs.append(d)
        current = new
        if d < tol:
            converged = True
            break
        if growth >= 3:
            diverged = True
            break
    return PicardResult(times, current, diffs, ratios, converged, diverged, grid, T_local)


def _bcast(phase, arr):
    """Multiply per-time samples arr (K, [2,] n, n) by phase (K, n, n)."""
    if arr.ndim == 4:
        return phase[:, None] * arr
    return phase * arr


def max_contractive_time(state0, params, candidates, iters=8, n_t=32, norm_spec=None):
    """Largest candidate T_local for which Picard differences contract.

    Exploratory only: the local existence time has no quantitative form to
    compare against.
    """
    best = 0.0
    for T in sorted(candidates):
        res = picard_iterate(state0, params, T, iters=iters, tol=1e-14, n_t=n_t, norm_spec=norm_spec)
        if res.diverged or (res.ratios and max(res.ratios[1:] or res.ratios) >= 1.0):
            break
        best = T
    return best


# -- diagnostics ---------------------------------------------------------------

def residual_original(traj, params, dealias=True):
    """Residuals of the unsplit equations along a trajectory.

    Space derivatives are spectral, time derivatives centred second-order
    differences; products use the same dealiasing as the solver.  Returns
    the space-time l^2 norms (dx^2 dt measure) of the Dirac and KG residuals.
    """
    K = len(traj.times)
    if K < 5:
        raise ParameterError("residual_original needs at least 5 time samples")
    g = traj.grid
    dt = traj.dt
    if not np.allclose(np.diff(traj.times), dt, rtol=1e-9, atol=1e-14):
        raise ParameterError("trajectory samples must be uniformly spaced")
    xi1, xi2 = g.xi
    mask = g.dealias_mask if dealias else np.ones((g.n_x, g.n_x), bool)
    p = params
    res_d = 0.0
    res_k = 0.0
    for k in range(1, K - 1):
        psi = traj.psi[k]
        phi = traj.phi[k]
        psi_t = (traj.psi[k + 1] - traj.psi[k - 1]) / (2 * dt)
        phi_tt = (traj.phi[k + 1] - 2 * phi + traj.phi[k - 1]) / dt ** 2
        psi_hat = sfft.fft2(psi, norm="ortho")
        phi_hat = sfft.fft2(phi, norm="ortho")
        # alpha . grad  <->  i xi . alpha
        sym = np.empty_like(psi_hat)
        sym[0] = (xi1 - 1j * xi2) * psi_hat[1]
        sym[1] = (xi1 + 1j * xi2) * psi_hat[0]
        grad = sfft.ifft2(1j * sym, norm="ortho")
        psi_m = sfft.ifft2(psi_hat * mask, norm="ortho")
        phi_m = sfft.ifft2(phi_hat * mask, norm="ortho")
        fbp = np.stack([phi_m * psi_m[0], -phi_m * psi_m[1]])
        fbp = sfft.ifft2(sfft.fft2(fbp, norm="ortho") * mask, norm="ortho")
        bpp = np.abs(psi_m[0]) ** 2 - np.abs(psi_m[1]) ** 2
        bpp = sfft.ifft2(sfft.fft2(bpp, norm="ortho") * mask, norm="ortho")
        lap = sfft.ifft2(-(g.xi_abs ** 2) * phi_hat, norm="ortho")
        rd = 1j * (psi_t + grad) + p.M * dirac.apply_beta(psi) + p.coupling * fbp
        rk = -phi_tt + lap + p.m * phi + p.coupling * bpp
        res_d += np.sum(np.abs(rd) ** 2)
        res_k += np.sum(np.abs(rk) ** 2)
    meas = g.dx ** 2 * dt
    return float(np.sqrt(res_d * meas)), float(np.sqrt(res_k * meas))


def time_series(traj_states, norm_specs=()):
    """Rows {t, charge, <norm labels>} for a list of states."""
    rows = []
    for st in traj_states:
        psi, phi, dtphi = reassemble(st)
        row = {"t": st.time, "charge": charge(st.psi_plus, st.psi_minus)}
        for label, which, spec in norm_specs:
            f = {"psi": psi, "phi": phi, "dtphi": dtphi}[which]
            row[label] = fourier_lebesgue_norm(dft_forward(f), spec)
        rows.append(row)
    return rows


# -- initial data families ----------------------------------------------------

def make_data(grid, spec, rng=None):
    """Build (psi0, phi0, phi1) from a data description.

    ``spec`` keys: ``family`` in {zero, gaussian, single_mode, random_spectrum},
    ``amplitude`` and family-specific entries (``width``, ``center``, ``mode``,
    ``decay``).
    """
    family = spec.get("family", "gaussian")
    amp = float(spec.get("amplitude", 0.1))
    n = grid.n_x
    x1, x2 = grid.x
    L = grid.period_L
    if family == "zero":
        z = np.zeros((n, n))
        return SpinorField(grid, np.zeros((2, n, n))), ScalarField(grid, z), ScalarField(grid, z)
    if family == "gaussian":
        w = float(spec.get("width", L / 8))
        c = spec.get("center", [L / 2, L / 2])
        # periodic (von Mises) envelope: ~ exp(-|x-c|^2 / 2w^2) near the centre
        q = L / (2 * np.pi)
        th1 = (x1 - c[0]) / q
        th2 = (x2 - c[1]) / q
        d1, d2 = q * np.sin(th1), q * np.sin(th2)
        gauss = np.exp(-(q / w) ** 2 * (2 - np.cos(th1) - np.cos(th2)))
        psi = amp * np.stack([gauss, 1j * (d1 + 1j * d2) / w * gauss])
        phi0 = amp * gauss
        phi1 = amp * (d1 / w) * gauss
        return SpinorField(grid, psi), ScalarField(grid, phi0), ScalarField(grid, phi1)
    if family == "single_mode":
        k = spec.get("mode", [1, 0])
        xi = 2 * np.pi / L * np.asarray(k, float)
        wave = np.exp(1j * (xi[0] * x1 + xi[1] * x2))
        psi = amp * np.stack([wave, np.zeros_like(wave)])
        return (SpinorField(grid, psi), ScalarField(grid, amp * np.cos(xi[0] * x1 + xi[1] * x2)),
                ScalarField(grid, np.zeros((n, n))))
    if family == "random_spectrum":
        rng = rng if rng is not None else np.random.default_rng(0)
        a = float(spec.get("decay", 2.0))
        weight = bracket(grid.xi_abs) ** (-a) * grid.dealias_mask
        def draw(shape):
            z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            return z * weight
        psi = sfft.ifft2(draw((2, n, n)), norm="ortho")
        phi0 = sfft.ifft2(draw((n, n)), norm="ortho").real
        phi1 = sfft.ifft2(draw((n, n)), norm="ortho").real
        scale = amp / max(np.max(np.abs(psi)), 1e-300)
        return SpinorField(grid, psi * scale), ScalarField(grid, phi0 * scale), ScalarField(grid, phi1 * scale)
    raise ParameterError(f"unknown data family {family!r}")


def series_csv(rows):
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(float(v)) for k, v in r.items()})
    return buf.getvalue()
