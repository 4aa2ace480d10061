"""Random sampling configuration and ratio statistics shared by the checks."""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

STABILITY_TOL = 0.05
SKIP_WARN_FRACTION = 0.01


class DegenerateSampleWarning(UserWarning):
    """More than 1% of the drawn samples were degenerate and skipped."""


@dataclass(frozen=True)
class SampleConfig:
    """Number of samples, magnitude range for the frequency variables and seed.

    Magnitudes are drawn log-uniformly from ``magnitude``; directions
    uniformly.  ``chunk`` bounds the working-set size of vectorised draws.
    """

    count: int = 100_000
    magnitude: tuple = (0.1, 10.0)
    seed: int = 0
    chunk: int = 250_000

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ParameterError(f"count must be a positive integer, got {self.count}")
        lo, hi = self.magnitude
        if not (0 < lo < hi):
            raise ParameterError(f"magnitude range must satisfy 0 < lo < hi, got {self.magnitude}")

    def rng(self, stream=0):
        return np.random.default_rng([self.seed, stream])

    def as_dict(self):
        return {"count": self.count, "magnitude": list(self.magnitude), "seed": self.seed}


def log_uniform(rng, lo, hi, size):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def random_vectors(rng, lo, hi, size):
    """2-vectors with log-uniform length in [lo, hi] and uniform direction."""
    r = log_uniform(rng, lo, hi, size)
    th = rng.uniform(0.0, 2 * np.pi, size)
    return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)


def random_signed(rng, lo, hi, size):
    return log_uniform(rng, lo, hi, size) * rng.choice([-1.0, 1.0], size)


def prefix_extremes(ratios, minimum=64):
    """Running max/min of ``ratios`` at the doubling prefixes ending at len(ratios)."""
    n = len(ratios)
    sizes = []
    m = n
    while m >= minimum:
        sizes.append(m)
        m //= 2
    sizes = sorted(set(sizes)) or [n]
    rows = []
    for m in sizes:
        part = ratios[:m]
        rows.append({"samples": int(m), "max_ratio": float(part.max()), "min_ratio": float(part.min())})
    return rows


def relative_change(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def stable(trend, key, tol=STABILITY_TOL):
    """True when the last doubling moved ``key`` by less than ``tol`` (relative)."""
    if len(trend) < 2:
        return True
    return relative_change(trend[-2][key], trend[-1][key]) < tol


def monotone(trend, key, increasing=True):
    vals = [row[key] for row in trend]
    pairs = zip(vals, vals[1:])
    return all(b >= a for a, b in pairs) if increasing else all(b <= a for a, b in pairs)


def warn_skips(skipped, total, label):
    if total and skipped / total > SKIP_WARN_FRACTION:
        warnings.warn(f"{label}: {skipped} of {total} samples degenerate and skipped",
                      DegenerateSampleWarning, stacklevel=3)
