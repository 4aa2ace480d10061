"""Random-field ratio checks for product estimates in X^r_{alpha,b} spaces."""
from fractions import Fraction

import numpy as np

from ..errors import ParameterError
from ..grid import GridSpec
from ..report import EstimateReport
from .region import exact, hypothesis_violations, reduction_instances
from .sampling import SampleConfig
from .xspace import padded_physical, random_x_field, spectrum_on, x_norm, x_weight

WHICH = ("prop_2_3", "prop_1_4", "reductions_1_to_6")
RESOLUTIONS = (16, 32)
GROWTH_LIMIT = 0.5


def _instances(alphas, betas, r, which, eps):
    """[(name, target, u_space, v_space, hypotheses)] with spaces as (alpha, b)."""
    if which == "prop_2_3":
        a1, a2 = alphas
        b1, b2 = betas
        return [("prop_2_3", (0, 0), (a1, b1), (a2, b2), [("prop_2_3", (a1, a2), (b1, b2))])]
    if which == "prop_1_4":
        a0, a1, a2 = alphas
        g, b = betas
        return [("prop_1_4", (a0, g), (a1, b), (a2, b), [("prop_1_4", (a0, a1, a2), (g, b))])]
    if which == "reductions_1_to_6":
        s, l = alphas
        (b,) = betas
        return [(inst["name"], inst["target"], inst["u"], inst["w"], inst["hyp"])
                for inst in reduction_instances(s, l, r, b, eps)]
    raise ParameterError(f"which must be one of {WHICH}, got {which!r}")


def validate_product(alphas, betas, r, which, eps=0.01):
    """{instance name: [violated constraints]} for the selected estimate(s)."""
    out = {}
    for name, _, _, _, hyps in _instances(alphas, betas, r, which, eps):
        bad = []
        for kind, a, b in hyps:
            tag = "" if kind == name else f"{kind}: "
            bad += [tag + v for v in hypothesis_violations(kind, a, b, r)]
        out[name] = bad
    return out


def product_ratio(u, v, target, q):
    """||uv||_{X^q_{target}} / (||u|| ||v||) for unit-normalised inputs (ratio = numerator)."""
    g = u.grid
    w = spectrum_on(g.padded(), padded_physical(u.values, g) * padded_physical(v.values, g))
    return x_norm(w, float(target[0]), float(target[1]), "wave", q)


def _ratios(grid, target, us, vs, r, count, rng):
    pg = grid.padded()
    wt = x_weight(pg, float(target[0]), float(target[1]), "wave")
    out = np.zeros(count)
    for i in range(count):
        u = random_x_field(grid, float(us[0]), float(us[1]), "wave", r, rng, spinor=False)
        v = random_x_field(grid, float(vs[0]), float(vs[1]), "wave", r, rng, spinor=False)
        w = spectrum_on(pg, padded_physical(u.values, grid) * padded_physical(v.values, grid))
        out[i] = x_norm(w, float(target[0]), float(target[1]), "wave", r, weight=wt)
    return out


def product_estimate_check(alphas, betas, r, which, cfg=None, eps=0.01, override=False, validate_only=False,
                           resolutions=RESOLUTIONS, period_L=2 * np.pi, window_T=2 * np.pi):
    """Validate the hypotheses of a product estimate and measure random-field ratios.

    ``which="prop_2_3"``: alphas = (a1, a2), betas = (b1, b2), target X^r_{0,0}.
    ``which="prop_1_4"``: alphas = (a0, a1, a2), betas = (gamma, b), target X^r_{a0,gamma}.
    ``which="reductions_1_to_6"``: alphas = (s, l), betas = (b,); runs the eight
    reduced product estimates with their instantiated parameters.
    """
    violations = validate_product(alphas, betas, r, which, eps)
    bad = {k: v for k, v in violations.items() if v}
    params = {"alphas": [float(exact(a)) for a in alphas], "betas": [float(exact(b)) for b in betas],
              "r": float(exact(r)), "which": which, "override": override, "valid": not bad}
    if bad and not override and not validate_only:
        msg = "; ".join(f"{k}: {', '.join(v)}" for k, v in bad.items())
        raise ParameterError(f"hypotheses violated: {msg}")
    if validate_only:
        return EstimateReport(operation="product_estimate_check", parameters=params, epsilon=eps,
                              passed=not bad, notes=[f"{k}: {m}" for k, v in bad.items() for m in v])
    cfg = cfg or SampleConfig(count=50)
    q = float(exact(r))
    table, constants, ok = [], {}, not bad
    for name, target, us, vs, _ in _instances(alphas, betas, r, which, eps):
        per = []
        for n in resolutions:
            g = GridSpec(n, period_L, n, window_T)
            ratios = _ratios(g, target, us, vs, q, cfg.count, cfg.rng(n))
            per.append(float(ratios.max()))
            table.append({"estimate": name, "n_x": n, "max_ratio": per[-1], "target": [float(x) for x in target],
                          "u": [float(x) for x in us], "v": [float(x) for x in vs]})
        growth = (per[-1] - per[0]) / per[0] if per[0] > 0 else 0.0
        constants[f"{name}_max_ratio"] = max(per)
        constants[f"{name}_growth"] = growth
        ok = ok and growth < GROWTH_LIMIT
    constants["max_ratio"] = max(v for k, v in constants.items() if k.endswith("_max_ratio"))
    return EstimateReport(
        operation="product_estimate_check",
        parameters={**params, "resolutions": list(resolutions)},
        seed=cfg.seed,
        count=cfg.count,
        epsilon=eps,
        constants=constants,
        passed=bool(ok),
        notes=[f"{k}: {m}" for k, v in bad.items() for m in v],
        table=table,
    )
