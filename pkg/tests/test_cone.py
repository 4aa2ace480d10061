import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from dkglab.errors import ParameterError
from dkglab.harness import (
    ConeIntegralSpec,
    EmptyConicWarning,
    cone_delta_integral,
    expected_cone_exponents,
    fit_cone_exponents,
    reference_weights,
)


def polar_oracle(tau, xi, a1, a2, branch):
    """Same integral in polar coordinates around eta = 0.

    On each ray eta = rho e the conic condition is solved for rho; the delta
    contributes 1 / |d/d rho (|eta| -+ |eta - xi|)| and the area element rho.
    """
    xi = np.asarray(xi, float)
    X = float(np.hypot(*xi))

    def f(th):
        e = np.array([math.cos(th), math.sin(th)])
        p = float(e @ xi)
        if branch == "sum":
            rho = (tau * tau - X * X) / (2 * (tau - p))
        else:
            if p <= tau:
                return 0.0
            rho = (X * X - tau * tau) / (2 * (p - tau))
            if rho <= 0 or rho - tau < 0:
                return 0.0
        # |eta - xi| and 1 -+ (rho - p)/d written without cancellation at large rho
        d = math.sqrt((rho - p) ** 2 + (X * X - p * p))
        if branch == "sum":
            deriv = 1 + (rho - p) / d
        else:
            deriv = (X * X - p * p) / (d * (d + rho - p))
        if not deriv > 0 or math.isinf(rho):
            return 0.0
        return rho * rho ** -a1 * d ** -a2 / abs(deriv)

    phi = math.atan2(xi[1], xi[0])
    opts = dict(limit=400, epsabs=1e-13, epsrel=1e-11)
    if branch == "sum":
        return integrate.quad(f, phi - math.pi, phi + math.pi, points=[phi], **opts)[0]
    # rays meet the hyperbola only inside the asymptotic cone, with integrable endpoint singularities
    th0 = math.acos(tau / X)
    half = lambda u: f(phi + th0 * (1 - u * u)) * 2 * u * th0 + f(phi - th0 * (1 - u * u)) * 2 * u * th0
    return integrate.quad(half, 0.0, 1.0, **opts)[0]


@given(st.floats(0.5, 4.0), st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
@settings(max_examples=25, deadline=None)
def test_difference_branch_matches_polar_oracle(X, frac, phi):
    xi = (X * math.cos(phi), X * math.sin(phi))
    tau = frac * X
    a1, a2 = 1.2, 1.3
    got = cone_delta_integral(ConeIntegralSpec(tau, xi, (a1, a2), "difference"))
    assert math.isclose(got, polar_oracle(tau, xi, a1, a2, "difference"), rel_tol=1e-6)


@given(st.floats(0.5, 4.0), st.floats(1.05, 5.0), st.floats(0, 2 * math.pi))
@settings(max_examples=25, deadline=None)
def test_sum_branch_matches_polar_oracle(X, frac, phi):
    xi = (X * math.cos(phi), X * math.sin(phi))
    tau = frac * X
    a1, a2 = 0.4, 0.7
    got = cone_delta_integral(ConeIntegralSpec(tau, xi, (a1, a2), "sum"))
    assert math.isclose(got, polar_oracle(tau, xi, a1, a2, "sum"), rel_tol=1e-6)


def test_regions_partition_the_integral():
    for branch, tau in (("difference", 0.3), ("sum", 3.5)):
        parts = [cone_delta_integral(ConeIntegralSpec(tau, (2.0, 0.0), (1.2, 1.3), branch, reg))
                 for reg in ("all", "inner", "outer")]
        assert math.isclose(parts[0], parts[1] + parts[2], rel_tol=1e-9)


def test_unweighted_ellipse_closed_form():
    # with no weights the integral is d/dtau of the area pi tau sqrt(tau^2 - |xi|^2) / 4
    tau, X = 5.0, 3.0
    got = cone_delta_integral(ConeIntegralSpec(tau, (X, 0.0), (0.0, 0.0), "sum"))
    root = math.sqrt(tau * tau - X * X)
    assert math.isclose(got, math.pi / 4 * (root + tau * tau / root), rel_tol=1e-9)


def test_divergent_weights_give_infinity():
    assert cone_delta_integral(ConeIntegralSpec(0.5, (1.0, 0.0), (0.9, 0.9), "difference")) == math.inf


def test_empty_conics_warn_and_return_zero():
    with pytest.warns(EmptyConicWarning):
        assert cone_delta_integral(ConeIntegralSpec(1.0, (2.0, 0.0), (1, 1), "sum")) == 0.0
    with pytest.warns(EmptyConicWarning):
        assert cone_delta_integral(ConeIntegralSpec(3.0, (2.0, 0.0), (1, 1), "difference")) == 0.0


def test_spec_validation():
    with pytest.raises(ParameterError):
        ConeIntegralSpec(1.0, (0.0, 0.0), (1, 1))
    with pytest.raises(ParameterError):
        ConeIntegralSpec(1.0, (1.0, 0.0), (1, 1), branch="parabola")


def test_expected_exponents():
    assert expected_cone_exponents((1.0, 1.0)) == (-0.5, -0.5)
    r = 1.01
    A, B = expected_cone_exponents(reference_weights("difference", r))
    assert math.isclose(A, 0.5 - r) and B == -0.5
    A, B = expected_cone_exponents(reference_weights("sum", r))
    assert math.isclose(A, 0.5 - r / 2) and B == -0.5


@pytest.mark.parametrize("branch", ["difference", "sum"])
@pytest.mark.parametrize("r", [1.01, 1.5, 2.0])
def test_fit_recovers_exponents(branch, r):
    rep = fit_cone_exponents(branch, r)
    assert rep.passed
    assert abs(rep.constants["A"] - rep.constants["A_expected"]) < 0.05
    assert abs(rep.constants["B"] - rep.constants["B_expected"]) < 0.05
