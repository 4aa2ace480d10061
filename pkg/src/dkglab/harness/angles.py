"""Two-sided angle equivalences and the modulation bound for the null-form angle."""
import numpy as np

from ..errors import ParameterError
from ..report import EstimateReport
from .sampling import (
    log_uniform,
    monotone,
    prefix_extremes,
    random_signed,
    random_vectors,
    stable,
    warn_skips,
)


def _norm(v):
    return np.hypot(v[..., 0], v[..., 1])


def _angle(u, v):
    dot = u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]
    c = dot / (_norm(u) * _norm(v))
    return np.arccos(np.clip(c, -1.0, 1.0))


def hyperbolic_angle_sides(eta, xi):
    """angle(eta, eta - xi) and its two-sided comparison expression.

    |xi|^1/2 (|xi| - ||eta| - |eta - xi||)^1/2 / (|eta| |eta - xi|)^1/2.
    """
    eta = np.asarray(eta, float)
    xi = np.asarray(xi, float)
    d = eta - xi
    a, b, c = _norm(eta), _norm(d), _norm(xi)
    lhs = _angle(eta, d)
    rhs = np.sqrt(c * np.maximum(c - np.abs(a - b), 0.0) / (a * b))
    return lhs, rhs


def elliptic_angle_sides(eta, xi):
    """angle(eta, xi - eta) and its two-sided comparison expression.

    (|eta| + |xi - eta|)^1/2 (|eta| + |eta - xi| - |xi|)^1/2 / (|eta| |eta - xi|)^1/2.
    """
    eta = np.asarray(eta, float)
    xi = np.asarray(xi, float)
    d = xi - eta
    a, b, c = _norm(eta), _norm(d), _norm(xi)
    lhs = _angle(eta, d)
    rhs = np.sqrt((a + b) * np.maximum(a + b - c, 0.0) / (a * b))
    return lhs, rhs


def _bracket(x):
    return np.sqrt(1.0 + x * x)


def modulation_angle_sides(eta, xi, tau, lam, s1, s2, denominator="eta"):
    """angle(s1 eta, s2 (eta - xi)) and the modulation bound

    ((<|tau|-|xi|> + <lam + s1|eta|> + <lam - tau + s2|eta - xi|>) / min(<w>, <eta - xi>))^1/2

    with ``w = xi`` (``denominator="xi"``) or ``w = eta`` (``denominator="eta"``).
    """
    eta = np.asarray(eta, float)
    xi = np.asarray(xi, float)
    d = eta - xi
    s1 = np.asarray(s1, float)[..., None]
    s2 = np.asarray(s2, float)[..., None]
    lhs = _angle(s1 * eta, s2 * d)
    a, b, c = _norm(eta), _norm(d), _norm(xi)
    s1, s2 = s1[..., 0], s2[..., 0]
    num = _bracket(np.abs(tau) - c) + _bracket(lam + s1 * a) + _bracket(lam - tau + s2 * b)
    w = c if denominator == "xi" else a
    rhs = np.sqrt(num / np.minimum(_bracket(w), _bracket(b)))
    return lhs, rhs


def _ratios(lhs, rhs):
    """Ratios with 0/0 samples removed; returns (ratios, skipped)."""
    degenerate = (lhs == 0) & (rhs == 0)
    keep = ~degenerate
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(rhs[keep] > 0, lhs[keep] / rhs[keep], np.inf)
    return r, int(degenerate.sum())


def _draw_pairs(cfg, stream):
    lo, hi = cfg.magnitude
    rng = cfg.rng(stream)
    done = 0
    while done < cfg.count:
        m = min(cfg.chunk, cfg.count - done)
        yield rng, random_vectors(rng, lo, hi, m), random_vectors(rng, lo, hi, m)
        done += m


def verify_angle_equivalences(cfg, which="both"):
    """Sample the angle equivalences; report their min/max ratios and trends.

    ``which`` selects "hyperbolic", "elliptic" or "both".  Passes when every
    non-degenerate ratio is finite and positive and both extremes move by less
    than 5% over the last doubling of the sample size.
    """
    sides = {"hyperbolic": hyperbolic_angle_sides, "elliptic": elliptic_angle_sides}
    if which != "both":
        if which not in sides:
            raise ParameterError(f"which must be 'hyperbolic', 'elliptic' or 'both', got {which!r}")
        sides = {which: sides[which]}
    parts = {key: [] for key in sides}
    skipped = {key: 0 for key in sides}
    for _, eta, xi in _draw_pairs(cfg, stream=14):
        for key, fn in sides.items():
            r, k = _ratios(*fn(eta, xi))
            parts[key].append(r)
            skipped[key] += k
    constants, table, ok = {}, [], True
    notes = []
    for key in parts:
        ratios = np.concatenate(parts[key])
        warn_skips(skipped[key], cfg.count, key)
        trend = prefix_extremes(ratios)
        for row in trend:
            table.append({"estimate": key, **row})
        finite = bool(np.all(np.isfinite(ratios)) and np.all(ratios > 0))
        steady = stable(trend, "max_ratio") and stable(trend, "min_ratio")
        grows = monotone(trend, "max_ratio") and monotone(trend, "min_ratio", increasing=False)
        constants[f"{key}_max_ratio"] = float(ratios.max())
        constants[f"{key}_min_ratio"] = float(ratios.min())
        constants[f"{key}_skipped"] = skipped[key]
        if not finite:
            notes.append(f"{key}: non-finite or zero ratio encountered")
        if not steady:
            notes.append(f"{key}: extremes moved by more than 5% on the last doubling")
        ok = ok and finite and steady and grows
    constants["max_ratio"] = max(constants[f"{k}_max_ratio"] for k in parts)
    constants["min_ratio"] = min(constants[f"{k}_min_ratio"] for k in parts)
    return EstimateReport(
        operation="verify_angle_equivalences",
        parameters={"sampling": cfg.as_dict(), "which": which},
        seed=cfg.seed,
        count=cfg.count,
        constants=constants,
        skipped=sum(skipped.values()),
        passed=ok,
        notes=notes,
        table=table,
    )


def verify_angle_bound_16(cfg, denominator="eta"):
    """Empirical sup of angle / modulation bound over random (eta, xi, tau, lam) and signs.

    Half of the samples put both input frequencies exactly on their cones
    (lam = -s1|eta|, lam - tau = -s2|eta - xi|), where the bound is tightest;
    the other half perturb those positions by log-uniform signed offsets.
    """
    lo, hi = cfg.magnitude
    parts = []
    for rng, eta, xi in _draw_pairs(cfg, stream=16):
        m = len(eta)
        s1 = rng.choice([-1.0, 1.0], m)
        s2 = rng.choice([-1.0, 1.0], m)
        on = rng.random(m) < 0.5
        off1 = np.where(on, 0.0, random_signed(rng, lo, hi, m))
        off2 = np.where(on, 0.0, random_signed(rng, lo, hi, m))
        lam = -s1 * np.hypot(*eta.T) + off1
        tau = lam - (-s2 * np.hypot(*(eta - xi).T) + off2)
        lhs, rhs = modulation_angle_sides(eta, xi, tau, lam, s1, s2, denominator)
        parts.append(lhs / rhs)
    ratios = np.concatenate(parts)
    trend = prefix_extremes(ratios)
    finite = bool(np.all(np.isfinite(ratios)))
    steady = stable(trend, "max_ratio")
    notes = [] if steady else ["sup moved by more than 5% on the last doubling"]
    return EstimateReport(
        operation="verify_angle_bound_16",
        parameters={"sampling": cfg.as_dict(), "denominator": denominator},
        seed=cfg.seed,
        count=cfg.count,
        constants={"max_ratio": float(ratios.max()), "min_ratio": float(ratios.min())},
        passed=finite and steady and monotone(trend, "max_ratio"),
        notes=notes,
        table=[{"estimate": "modulation", **row} for row in trend],
    )
