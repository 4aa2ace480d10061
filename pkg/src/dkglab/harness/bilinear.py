"""Empirical constants of the null-form bilinear estimates on space-time lattices.

For unit vectors psi, psi' of the input spaces the ratio is the norm of
<beta Pi_s1(D) psi, Pi_s2(D) psi'> in the target space; the maximum over
random samples and the four sign pairs lower-bounds the operator norm.
Samples draw complex Gaussian coefficients (``phases="gaussian"``) or their
moduli (``phases="coherent"``, all phases aligned, exploratory).
"""
import numpy as np

from ..dirac import SignPair
from ..errors import ParameterError
from ..grid import GridSpec
from ..report import EstimateReport
from .region import bilinear_violations
from .sampling import SampleConfig, prefix_extremes, relative_change, stable
from .xspace import (
    SIGN_BRANCH,
    beta,
    dual,
    padded_physical,
    project,
    random_x_field,
    spectrum_on,
    spinor_pairing,
    x_norm,
    x_weight,
)

DEFAULT_EPS = 0.01
RESOLUTIONS = (16, 32, 64)
GROWTH_LIMIT = 0.5
PRECISIONS = {"double": np.complex128, "single": np.complex64}


def check_hypotheses(s, l, r, b, override=False):
    """Raise ParameterError naming the violated constraints unless ``override``."""
    bad = bilinear_violations(s, l, r, b)
    if bad and not override:
        raise ParameterError("parameters outside the admissible region: " + "; ".join(bad))
    return bad


def nullform_pairing(psi, psi_p, signs):
    """Space-time field of <beta Pi_s1 psi, Pi_s2 psi'> on the twice-refined grid."""
    g = psi.grid
    a = padded_physical(beta(project(psi.values, g, signs.s1)), g)
    b = padded_physical(project(psi_p.values, g, signs.s2), g)
    return spectrum_on(g.padded(), spinor_pairing(a, b))


def ratio_11(psi, psi_p, signs, s, l, r, b, eps=DEFAULT_EPS):
    """||<beta Pi psi, Pi psi'>||_{X^r_{l-1,b-1+eps}} / (||psi||_{X^r_{s,b,s1}} ||psi'||_{X^r_{s,b,s2}})."""
    den = x_norm(psi, s, b, SIGN_BRANCH[signs.s1], r) * x_norm(psi_p, s, b, SIGN_BRANCH[signs.s2], r)
    if den == 0:
        return 0.0
    w = nullform_pairing(psi, psi_p, signs)
    return x_norm(w, l - 1, b - 1 + eps, "wave", r) / den


def ratio_12(psi, psi_p, signs, s, l, r, b, eps=DEFAULT_EPS):
    """||<beta Pi psi, Pi psi'>||_{X^{r'}_{-l,-b}} / (||psi||_{X^r_{s,b,s1}} ||psi'||_{X^{r'}_{-s,1-b-eps,s2}})."""
    rp = dual(r)
    den = x_norm(psi, s, b, SIGN_BRANCH[signs.s1], r) * x_norm(psi_p, -s, 1 - b - eps, SIGN_BRANCH[signs.s2], rp)
    if den == 0:
        return 0.0
    w = nullform_pairing(psi, psi_p, signs)
    return x_norm(w, -l, -b, "wave", rp) / den


def _input_spaces(which, s, b, r, eps):
    """(s, b, q) for psi and psi' of each estimate."""
    if which == 11:
        return (s, b, r), (s, b, r)
    return (s, b, r), (-s, 1 - b - eps, dual(r))


def _draw(rng, shape, phases):
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return np.abs(z) if phases == "coherent" else z


def _sample_ratios(which, grid, s, l, r, b, eps, count, rng, phases="gaussian", precision="double"):
    """Array (count, 4) of ratios; the noise of a sample is shared by the sign pairs.

    Equivalent to calling :func:`ratio_11`/:func:`ratio_12` per pair, with the
    refined-grid fields of each sign computed once.  ``precision="single"``
    runs the refined-grid transforms in complex64 (about 1e-6 relative).
    """
    dtype = PRECISIONS[precision]
    (s1_, b1_, q1), (s2_, b2_, q2) = _input_spaces(which, s, b, r, eps)
    target = (l - 1, b - 1 + eps, r) if which == 11 else (-l, -b, dual(r))
    shape = (2, grid.n_t, grid.n_x, grid.n_x)
    pg = grid.padded()
    wt = x_weight(pg, target[0], target[1], "wave")
    out = np.zeros((count, 4))
    for i in range(count):
        z = _draw(rng, shape, phases)
        zp = _draw(rng, shape, phases)
        a, bb = {}, {}
        for sg in (1, -1):
            u = random_x_field(grid, s1_, b1_, SIGN_BRANCH[sg], q1, rng, noise=z)
            v = random_x_field(grid, s2_, b2_, SIGN_BRANCH[sg], q2, rng, noise=zp)
            a[sg] = padded_physical(beta(project(u.values, grid, sg)), grid, dtype=dtype)
            bb[sg] = padded_physical(project(v.values, grid, sg), grid, dtype=dtype)
        for j, p in enumerate(SignPair.all()):
            w = spectrum_on(pg, spinor_pairing(a[p.s1], bb[p.s2]))
            out[i, j] = x_norm(w, target[0], target[1], "wave", target[2], weight=wt)
    return out


def _bilinear_constant(which, s, l, r, b, grid=None, cfg=None, eps=DEFAULT_EPS, override=False,
                       resolutions=RESOLUTIONS, phases="gaussian", precision="double"):
    violations = check_hypotheses(s, l, r, b, override)
    cfg = cfg or SampleConfig(count=200)
    base = grid or GridSpec(16)
    table, per_res, sample_trend = [], {}, []
    for n in resolutions:
        g = GridSpec(n, base.period_L, n, base.window_T)
        ratios = _sample_ratios(which, g, s, l, r, b, eps, cfg.count, cfg.rng(n), phases, precision)
        best = ratios.max(axis=0)
        per_res[n] = float(best.max())
        row = {"n_x": n, "n_t": n, "max_ratio": per_res[n]}
        for p, v in zip(SignPair.all(), best):
            row[f"max_{p.label()}"] = float(v)
        table.append(row)
        sample_trend = prefix_extremes(ratios.max(axis=1), minimum=min(25, cfg.count))
    lo, hi = per_res[resolutions[0]], per_res[resolutions[-1]]
    growth = (hi - lo) / lo if lo > 0 else 0.0
    steady = stable(sample_trend, "max_ratio")
    notes = []
    if violations:
        notes.append("exploratory run outside the admissible region: " + "; ".join(violations))
    if not steady:
        notes.append("max ratio moved by more than 5% on the last sample doubling")
    admissible = not violations
    return EstimateReport(
        operation=f"bilinear_constant_{which}",
        parameters={"s": s, "l": l, "r": r, "b": b, "override": override, "admissible": admissible,
                    "resolutions": list(resolutions), "phases": phases, "precision": precision, "period_L": base.period_L, "window_T": base.window_T},
        seed=cfg.seed,
        count=cfg.count,
        grid=GridSpec(resolutions[-1], base.period_L, resolutions[-1], base.window_T).as_dict(),
        epsilon=eps,
        constants={
            "max_ratio": max(per_res.values()),
            "min_ratio": min(per_res.values()),
            "resolution_growth": growth,
            "sample_relative_change": relative_change(sample_trend[-2]["max_ratio"], sample_trend[-1]["max_ratio"])
            if len(sample_trend) > 1 else 0.0,
            "trend": [per_res[n] for n in resolutions],
        },
        passed=bool(admissible and growth < GROWTH_LIMIT and steady),
        notes=notes,
        table=table + [{"n_x": resolutions[-1], "samples": row["samples"], "max_ratio": row["max_ratio"]}
                       for row in sample_trend],
    )


def bilinear_constant_11(s, l, r, b, grid=None, cfg=None, eps=DEFAULT_EPS, override=False,
                         resolutions=RESOLUTIONS, phases="gaussian", precision="double"):
    """Max ratio for the X^r_{l-1,b-1+eps} bound of the spinor null form, per resolution."""
    return _bilinear_constant(11, s, l, r, b, grid, cfg, eps, override, resolutions, phases, precision)


def bilinear_constant_12(s, l, r, b, grid=None, cfg=None, eps=DEFAULT_EPS, override=False,
                         resolutions=RESOLUTIONS, phases="gaussian", precision="double"):
    """Max ratio for the dual-space bound X^{r'}_{-l,-b} of the same null form."""
    return _bilinear_constant(12, s, l, r, b, grid, cfg, eps, override, resolutions, phases, precision)
