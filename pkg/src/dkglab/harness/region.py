"""Admissible (s, l) regions and hypothesis validators, in exact rational arithmetic.

Inputs may be ints, Fractions, decimal strings or floats; floats are converted
through their shortest decimal representation (``1.01`` becomes ``101/100``).
"""
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParameterError

VARIANTS = ("minimal_s", "minimal_l")
NEAR_ONE_MAX_R = Fraction(11, 10)


def exact(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x))


@dataclass(frozen=True)
class RegionQuery:
    r: object
    delta: object
    variant: str = "minimal_l"

    def __post_init__(self):
        r, d = exact(self.r), exact(self.delta)
        if not (1 < r <= 2):
            raise ParameterError(f"r must lie in (1, 2], got {self.r}")
        if not d > 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if self.variant not in VARIANTS:
            raise ParameterError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


def threshold_pair(r, variant):
    """Base pair (s0, l0); r = 1 gives the endpoint limit of the formulas."""
    r = exact(r)
    if not (1 <= r <= 2):
        raise ParameterError(f"r must lie in [1, 2], got {r}")
    if variant == "minimal_s":
        return Fraction(33, 20) / r - Fraction(41, 40), Fraction(9, 5) / r - Fraction(11, 20)
    if variant == "minimal_l":
        return Fraction(5, 4) / r - Fraction(5, 8), 2 / r - Fraction(3, 4)
    raise ParameterError(f"variant must be one of {VARIANTS}, got {variant!r}")


def admissible_region(q):
    """(s0 + delta, l0 + delta) for the requested variant, as Fractions."""
    s0, l0 = threshold_pair(q.r, q.variant)
    d = exact(q.delta)
    return s0 + d, l0 + d


def l2_region_violations(s, l):
    """Violated constraints of the classical (r = 2) region; empty when inside."""
    s, l = exact(s), exact(l)
    out = []
    if not s > Fraction(-1, 5):
        out.append(f"s > -1/5 fails (s={float(s):.6g})")
    lo = max(Fraction(1, 4) - s / 2, Fraction(1, 4) + s / 2, s)
    hi = min(Fraction(3, 4) + 2 * s, Fraction(3, 4) + Fraction(3, 2) * s, 1 + s)
    if not l > lo:
        out.append(f"l > max(1/4 - s/2, 1/4 + s/2, s) fails (l={float(l):.6g}, bound={float(lo):.6g})")
    if not l < hi:
        out.append(f"l < min(3/4 + 2s, 3/4 + 3s/2, 1 + s) fails (l={float(l):.6g}, bound={float(hi):.6g})")
    return out


def in_l2_region(s, l):
    return not l2_region_violations(s, l)


def near_one_violations(s, l, r, b):
    """Hypotheses l >= s >= 5/(8r), 1/2 + 3/(4r) < l <= 1 + 1/(4r), b > 1/r."""
    s, l, r, b = exact(s), exact(l), exact(r), exact(b)
    out = []
    if not l >= s:
        out.append(f"l < s (l={float(l):.6g}, s={float(s):.6g})")
    if not s >= Fraction(5, 8) / r:
        out.append(f"s < 5/(8r) (s={float(s):.6g}, bound={float(Fraction(5, 8) / r):.6g})")
    lo = Fraction(1, 2) + Fraction(3, 4) / r
    if not l > lo:
        out.append(f"l ≤ 1/2 + 3/(4r) (l={float(l):.6g}, bound={float(lo):.6g})")
    hi = 1 + Fraction(1, 4) / r
    if not l <= hi:
        out.append(f"l > 1 + 1/(4r) (l={float(l):.6g}, bound={float(hi):.6g})")
    if not b > 1 / r:
        out.append(f"b ≤ 1/r (b={float(b):.6g}, bound={float(1 / r):.6g})")
    return out


def bilinear_violations(s, l, r, b):
    """Constraints violated by (s, l, r, b) for the bilinear null-form estimates.

    * r = 2: the classical region and b > 1/2.
    * 1 < r <= 1.1: the near-endpoint hypotheses, after lowering (s, l) by
      omega = max(0, l - 1 - 1/(4r)) (raising both regularities by the same
      amount preserves the estimates by the fractional Leibniz rule).
    * otherwise: (s, l) must exceed one of the two threshold pairs
      componentwise, with b > 1/r.
    """
    s, l, r, b = exact(s), exact(l), exact(r), exact(b)
    if not (1 < r <= 2):
        return [f"r must lie in (1, 2] (r={float(r):.6g})"]
    if r == 2:
        out = l2_region_violations(s, l)
        if not b > Fraction(1, 2):
            out.append(f"b ≤ 1/r (b={float(b):.6g}, bound=0.5)")
        return out
    if r <= NEAR_ONE_MAX_R:
        omega = max(Fraction(0), l - 1 - Fraction(1, 4) / r)
        return near_one_violations(s - omega, l - omega, r, b)
    out = []
    if not any(s > s0 and l > l0 for s0, l0 in (threshold_pair(r, v) for v in VARIANTS)):
        pairs = ", ".join(f"{v}=({float(a):.4g}, {float(c):.4g})" for v in VARIANTS
                          for a, c in [threshold_pair(r, v)])
        out.append(f"(s, l) does not exceed a threshold pair ({pairs})")
    if not b > 1 / r:
        out.append(f"b ≤ 1/r (b={float(b):.6g}, bound={float(1 / r):.6g})")
    return out


# -- product estimate hypotheses ------------------------------------------------

def product_2_3_violations(alphas, betas, r):
    """||uv||_{X^r_{0,0}} <~ ||u||_{X^r_{a1,b1}} ||v||_{X^r_{a2,b2}} hypotheses."""
    a1, a2 = (exact(a) for a in alphas)
    b1, b2 = (exact(b) for b in betas)
    r = exact(r)
    out = []
    if not (1 <= r <= 2):
        out.append(f"1 ≤ r ≤ 2 fails (r={float(r):.6g})")
        return out
    if not (a1 >= 0 and a2 >= 0):
        out.append("α1, α2 ≥ 0 fails")
    if not a1 + a2 > Fraction(3, 2) / r:
        out.append(f"α1 + α2 > 3/(2r) fails ({float(a1 + a2):.6g} ≤ {float(Fraction(3, 2) / r):.6g})")
    if not b1 + b2 > Fraction(3, 2) / r:
        out.append(f"b1 + b2 > 3/(2r) fails ({float(b1 + b2):.6g} ≤ {float(Fraction(3, 2) / r):.6g})")
    if not (b1 > Fraction(1, 2) / r and b2 > Fraction(1, 2) / r):
        out.append(f"b1, b2 > 1/(2r) fails (bound={float(Fraction(1, 2) / r):.6g})")
    return out


def product_1_4_violations(alphas, betas, r):
    """||uv||_{X^r_{a0,g}} <~ ||u||_{X^r_{a1,b}} ||v||_{X^r_{a2,b}} hypotheses.

    ``alphas = (a0, a1, a2)``, ``betas = (gamma, b)``.
    """
    a0, a1, a2 = (exact(a) for a in alphas)
    g, b = (exact(x) for x in betas)
    r = exact(r)
    out = []
    if not (1 < r <= 2):
        out.append(f"1 < r ≤ 2 fails (r={float(r):.6g})")
        return out
    if not a0 > 1 / r - g:
        out.append(f"α0 > 1/r - γ fails ({float(a0):.6g} ≤ {float(1 / r - g):.6g})")
    if not a1 + a2 > 2 / r:
        out.append(f"α1 + α2 > 2/r fails ({float(a1 + a2):.6g} ≤ {float(2 / r):.6g})")
    if not (0 <= a0 <= a1 and a0 <= a2):
        out.append("0 ≤ α0 ≤ α1, α2 fails")
    if max(a1, a2) == Fraction(3, 2) / r:
        out.append("max(α1, α2) ≠ 3/(2r) fails")
    if not b >= g:
        out.append(f"b ≥ γ fails ({float(b):.6g} < {float(g):.6g})")
    lhs, rhs = a1 + a2 - a0, g + 1 / r
    half = Fraction(1, 2) / r
    if not ((lhs > rhs and g >= half) or (lhs >= rhs and g > half)):
        out.append(f"α1 + α2 - α0 > γ + 1/r with γ ≥ 1/(2r) (or ≥ with >) fails "
                   f"(α1+α2-α0={float(lhs):.6g}, γ+1/r={float(rhs):.6g}, γ={float(g):.6g}, 1/(2r)={float(half):.6g})")
    if not g >= max(a1, a2) - 1 / r:
        out.append(f"γ ≥ max(α1, α2) - 1/r fails ({float(g):.6g} < {float(max(a1, a2) - 1 / r):.6g})")
    if not b > 1 / r:
        out.append(f"b > 1/r fails ({float(b):.6g} ≤ {float(1 / r):.6g})")
    return out


def reduction_instances(s, l, r, b, eps):
    """The product estimates the (12') reduction rests on, with their parameters.

    Each entry: name, target (alpha, beta) for uw, input (alpha, beta) of u
    and of w, and the list of sub-estimate hypotheses as (kind, alphas, betas).
    """
    s, l, r, b, eps = (exact(x) for x in (s, l, r, b, eps))
    h = Fraction(1, 2) / r
    low = b - 1 + eps
    # (1')-(4') follow from the Leibniz rule and the gamma = 0 product estimate
    lead = [("prop_2_3", (l, h), (b, b - h))]
    out = [
        {"name": "1'", "target": (s - h, low), "u": (s, b), "w": (l, b - h), "hyp": lead},
        {"name": "2'", "target": (s, low), "u": (s + h, b), "w": (l, b - h), "hyp": lead},
        {"name": "3'", "target": (s - h, low), "u": (s, b - h), "w": (l, b), "hyp": lead},
        {"name": "4'", "target": (s, low), "u": (s + h, b - h), "w": (l, b), "hyp": lead},
        {"name": "5'", "target": (s - h, b - 1 + h + eps), "u": (s, b), "w": (l, b),
         "hyp": [("prop_1_4", (0, h, 1 + h + eps), (1, b)),
                 ("prop_2_3", (h, 1 / r + eps), (b, b)),
                 ("prop_1_4", (0, s, 1 + 1 / r - s), (1, b)),
                 ("prop_2_3", (s, Fraction(3, 2) / r - s + eps), (b, b))]},
        {"name": "6'", "target": (s, b - 1 + h + eps), "u": (s + h, b), "w": (l, b),
         "hyp": [("prop_1_4", (s, s + h, l), (b - 1 + h + eps, b))]},
        {"name": "5a", "target": (0, b - 1 + h + eps), "u": (h, b), "w": (Fraction(1, 2) + Fraction(3, 4) / r + eps, b),
         "hyp": [("prop_1_4", (0, h, 1 + h + eps), (1, b)), ("prop_2_3", (h, 1 / r + eps), (b, b))]},
        {"name": "5b", "target": (0, b - 1 + h + eps), "u": (s, b), "w": (Fraction(1, 2) + Fraction(5, 4) / r - s + eps, b),
         "hyp": [("prop_1_4", (0, s, 1 + 1 / r - s), (1, b)), ("prop_2_3", (s, Fraction(3, 2) / r - s + eps), (b, b))]},
    ]
    return out


def hypothesis_violations(kind, alphas, betas, r):
    if kind == "prop_2_3":
        return product_2_3_violations(alphas, betas, r)
    if kind == "prop_1_4":
        return product_1_4_violations(alphas, betas, r)
    raise ParameterError(f"unknown product estimate {kind!r}")
