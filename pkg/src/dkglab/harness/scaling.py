"""Scaling exponents of homogeneous Fourier-Lebesgue norms.

f_lam(x) = lam^a f(lam x) has exactly the same samples as f on the grid of
period L / lam, so the rescaled field is realised by re-indexing the lattice.
"""
import math

import numpy as np

from ..errors import DomainError, ParameterError
from ..grid import GridSpec, ScalarField, SpinorField, dft_forward
from ..norms import NormSpec, fourier_lebesgue_norm, zero_mode_fraction
from ..report import EstimateReport

AMPLITUDE_POWER = {"spinor": 1.5, "kg_field": 1.0}
ZERO_MODE_LIMIT = 1e-12


def modulated_gaussian(grid, kind="spinor", width=None, wave=14):
    """Gaussian bump times e^{i k x}; negligible xi = 0 content for k * width >= 6."""
    L = grid.period_L
    w = width or L / 12
    x1, x2 = grid.x
    env = np.exp(-((x1 - L / 2) ** 2 + (x2 - L / 2) ** 2) / (2 * w * w))
    carrier = np.exp(1j * (2 * np.pi / L) * wave * x1)
    if kind == "spinor":
        return SpinorField(grid, np.stack([env * carrier, 0.5j * env * carrier]))
    return ScalarField(grid, env * carrier)


def expected_exponent(s, r, field_kind="spinor"):
    return AMPLITUDE_POWER[field_kind] + s - 2.0 / r


def scaling_check(s, r, field_kind="spinor", field=None, lambdas=(2, 4, 8), tol=1e-2):
    """Fit the exponent e in ||f_lam|| = lam^e ||f|| of the homogeneous H^{s,r} norm."""
    if field_kind not in AMPLITUDE_POWER:
        raise ParameterError(f"field_kind must be one of {tuple(AMPLITUDE_POWER)}, got {field_kind!r}")
    lams = [float(x) for x in lambdas if float(x) != 1.0]
    notes = [] if len(lams) == len(lambdas) else ["lambda = 1 excluded (degenerate for the fit)"]
    if not lams:
        raise ParameterError("need at least one lambda != 1")
    f = field if field is not None else modulated_gaussian(GridSpec(64), field_kind)
    f = f.to_physical()
    spec = NormSpec(s, r, homogeneous=True)
    frac = zero_mode_fraction(dft_forward(f))
    if frac > ZERO_MODE_LIMIT:
        raise DomainError(f"xi = 0 carries {frac:.3g} of the mass (limit {ZERO_MODE_LIMIT}); homogeneous norm unusable")
    a = AMPLITUDE_POWER[field_kind]
    base = fourier_lebesgue_norm(dft_forward(f), spec)
    table = [{"lambda": 1.0, "norm": base}]
    x, y = [], []
    for lam in lams:
        g = f.grid.scaled(lam)
        fl = type(f)(g, lam ** a * f.values, False)
        val = fourier_lebesgue_norm(dft_forward(fl), spec)
        table.append({"lambda": lam, "norm": val})
        x.append(math.log(lam))
        y.append(math.log(val / base))
    x, y = np.asarray(x), np.asarray(y)
    exponent = float(np.dot(x, y) / np.dot(x, x))
    expect = expected_exponent(s, r, field_kind)
    return EstimateReport(
        operation="scaling_check",
        parameters={"s": s, "r": r, "field_kind": field_kind, "lambdas": lams, "tolerance": tol},
        count=len(lams),
        grid=f.grid.as_dict(),
        constants={"exponent": exponent, "expected": expect, "zero_mode_fraction": frac},
        passed=abs(exponent - expect) <= tol,
        notes=notes,
        table=table,
    )
