import math

import numpy as np
import pytest

from kummer_gap.errors import DegenerateParameters, PreconditionViolated
from kummer_gap.integrals import (
    integral_at_zero_decomposition,
    integral_lower_bound,
    integral_recursion_rhs,
    integral_upper_bound,
    integral_via_parameter_derivative,
    product_integral,
    product_integral_closed_form,
    self_integral,
    self_integral_closed_form,
    weighted_phi_sq_integral,
)
from kummer_gap.special_functions import kummer_m
from kummer_gap.zero_finder import find_zeros


def test_trivial_integrals():
    r = weighted_phi_sq_integral(0, 1, 1, tol=1e-12)
    assert r.value == pytest.approx(1 - math.exp(-1), rel=1e-12)
    assert r.abs_error_estimate >= 0 and r.panels_used >= 1
    assert weighted_phi_sq_integral(0, 2, 2, tol=1e-12).value == pytest.approx(1 - 3 * math.exp(-2), rel=1e-12)


def test_singular_weight_against_oracle(oracle):
    a, b, z = -2.3, 0.4, 6.0
    ref = oracle.quad(
        lambda t: t ** (b - 1) * oracle.exp(-t) * oracle.hyp1f1(a, b, t) ** 2, [0, 1e-6, 1e-3, 0.1, 1, z]
    )
    assert weighted_phi_sq_integral(a, b, z).value == pytest.approx(float(ref), rel=1e-10)


def test_product_closed_form_xi_zero():
    expected = math.exp(-1) * float(kummer_m(2, 3, 1).value) / 2
    assert product_integral_closed_form(0, 1, 2, 1) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("xi,eta,b,z", [(-1, -2, 1.5, 3), (0.5, 1.5, 2.5, 5)])
def test_product_closed_form_vs_quadrature(xi, eta, b, z):
    assert product_integral_closed_form(xi, eta, b, z) == pytest.approx(
        product_integral(xi, eta, b, z).value, rel=1e-10
    )


def test_product_closed_form_degenerate():
    with pytest.raises(DegenerateParameters):
        product_integral_closed_form(1.0, 1.0, 2.0, 1.0)


@pytest.mark.parametrize("a,b,z", [(0, 1, 1), (-1, 2, 2)])
def test_self_closed_form_vs_quadrature(a, b, z):
    assert self_integral_closed_form(a, b, z) == pytest.approx(self_integral(a, b, z).value, rel=1e-10)


def test_self_closed_form_at_zero_matches_decomposition(worked_zeros, worked_z):
    nu1 = worked_zeros[0]
    closed = self_integral_closed_form(nu1, 1.5, worked_z)
    # (k/t - 1/2) t^b e^-t Phi^2 integrates to k*I - remainder*(b - 2a)/2
    boundary, rest = integral_at_zero_decomposition(nu1, 1.5, worked_z)
    k = 0.75 - nu1
    total = boundary + rest
    assert closed == pytest.approx(k * total - rest * (1.5 - 2 * nu1) / 2, rel=1e-9)


def test_recursion_needs_zero():
    with pytest.raises(PreconditionViolated):
        integral_recursion_rhs(-0.5, 1.5, 14.0873)


@pytest.mark.parametrize("index", [0, 1])
def test_recursion_at_worked_zeros(worked_zeros, worked_z, index):
    a = worked_zeros[index]
    assert integral_recursion_rhs(a, 1.5, worked_z) == pytest.approx(
        weighted_phi_sq_integral(a, 1.5, worked_z).value, rel=1e-8
    )


def test_recursion_b5():
    from kummer_gap.first_passage import solve_threshold

    z = solve_threshold(1e-4, 10, 10.0) ** 2 / 2
    a = find_zeros(5.0, z, 3)[2]
    assert integral_recursion_rhs(a, 5.0, z) == pytest.approx(weighted_phi_sq_integral(a, 5.0, z).value, rel=1e-8)


def test_upper_bound_guard(worked_zeros, worked_z):
    with pytest.raises(PreconditionViolated):
        integral_upper_bound(worked_zeros[1], 1.5, worked_z)


@pytest.mark.parametrize("index", [9, 10])
def test_upper_bound_dominates(worked_zeros, worked_z, index):
    a = worked_zeros[index]
    assert integral_upper_bound(a, 1.5, worked_z) >= weighted_phi_sq_integral(a, 1.5, worked_z).value


@pytest.mark.parametrize("index", [0, 4])
def test_lower_bound_dominated(worked_zeros, worked_z, index):
    a = worked_zeros[index]
    assert integral_lower_bound(a, 1.5, worked_z) <= weighted_phi_sq_integral(a, 1.5, worked_z).value


def test_lower_bound_guard():
    with pytest.raises(PreconditionViolated):
        integral_lower_bound(-0.5, 1.5, 14.0873)


@pytest.mark.parametrize("index", [1, 6])
def test_parameter_derivative_route(worked_zeros, worked_z, index):
    a = worked_zeros[index]
    assert integral_via_parameter_derivative(a, 1.5, worked_z) == pytest.approx(
        weighted_phi_sq_integral(a, 1.5, worked_z).value, rel=1e-6
    )


def test_randomized_product_identity():
    rng = np.random.default_rng(11)
    for _ in range(10):
        xi, eta = rng.uniform(-6, 3, 2)
        b, z = rng.uniform(0.3, 6), rng.uniform(0.5, 20)
        q = product_integral(xi, eta, b, z)
        c = product_integral_closed_form(xi, eta, b, z)
        assert abs(q.value - c) <= max(1e-9 * abs(q.value), 10 * q.abs_error_estimate)
