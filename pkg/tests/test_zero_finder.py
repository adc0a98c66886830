import math

import numpy as np
import pytest

from kummer_gap.errors import DomainError, PreconditionViolated, ScanExhausted
from kummer_gap.integrals import phi_vanishes
from kummer_gap.special_functions import kummer_m
from kummer_gap.zero_finder import (
    REFINE_RTOL,
    approx_trajectory,
    comparison_rhs,
    count_positive_z_zeros,
    find_z_zeros,
    find_zeros,
    integrate_trajectory,
    iter_zeros,
    trajectory_rhs,
)


def _sign(a, b, z):
    return float(kummer_m(a, b, z, strict=False).value) > 0


def test_sequence_invariants(worked_zeros):
    zs = worked_zeros
    assert all(v < 0 for v in zs)
    assert all(g > 0 for g in zs.gaps())
    for v, (lo, hi) in zip(zs, zs.brackets):
        assert lo <= v <= hi
        assert hi - lo <= REFINE_RTOL * max(1.0, abs(v)) * 1.01
        assert phi_vanishes(v, zs.b, zs.z)
        assert _sign(lo, zs.b, zs.z) != _sign(hi, zs.b, zs.z)


def test_b_half_triple_against_oracle(oracle):
    zs = find_zeros(0.5, 5.0, 3)
    assert zs.gaps()[0] > 0 and zs.gaps()[1] > 0
    # independent reference: fine scan at step 1e-3 in mpmath, then findroot
    f = lambda a: oracle.hyp1f1(a, oracle.mpf(0.5), oracle.mpf(5))
    refs = []
    grid = np.arange(0, -4, -1e-3)
    prev = f(grid[0])
    for lo in grid[1:]:
        cur = f(lo)
        if (cur > 0) != (prev > 0):
            refs.append(float(oracle.findroot(f, (lo, lo + 1e-3), solver="anderson")))
            if len(refs) == 3:
                break
        prev = cur
    assert list(zs) == pytest.approx(refs, abs=1e-11)


def test_first_zero_recedes_as_z_shrinks():
    assert find_zeros(1.5, 0.01, 1)[0] < find_zeros(1.5, 1.0, 1)[0]


def test_b5_z21_five_zeros():
    zs = find_zeros(5.0, 21.0, 5)
    assert len(zs) == 5 and all(g > 0 for g in zs.gaps())


def test_zeros_increase_with_z_and_never_cross():
    zgrid = np.linspace(3.0, 16.0, 10)
    table = np.array([find_zeros(1.5, z, 4).zeros for z in zgrid])
    assert np.all(np.diff(table, axis=0) > 0)
    # zero k at larger z stays below zero k-1 at smaller z
    for i in range(len(zgrid) - 1):
        assert np.all(table[i + 1, 1:] < table[i, :-1])


def test_count_validation():
    with pytest.raises(DomainError):
        find_zeros(1.5, 5.0, 0)
    with pytest.raises(DomainError):
        find_zeros(-1.0, 5.0, 1)


def test_scan_limit():
    with pytest.raises(ScanExhausted):
        next(iter_zeros(1.5, 0.001, nu_min=-5.0))


@pytest.mark.parametrize("a,b,expected", [(-2.5, 1.5, 3), (-1.0, 2.0, 1), (-0.3, 1.0, 1)])
def test_z_zero_count(a, b, expected):
    assert count_positive_z_zeros(a, b) == expected


def test_polynomial_z_zero():
    assert find_z_zeros(-1.0, 2.0) == pytest.approx([2.0], rel=1e-12)


def test_z_zero_domain():
    with pytest.raises(DomainError):
        find_z_zeros(0.5, 1.0)


def test_trajectory_rhs_bounds(worked_zeros, worked_z):
    a = worked_zeros[1]
    rhs = trajectory_rhs(a, 1.5, worked_z)
    assert 0 < rhs <= (0.75 - a) / worked_z


def test_trajectory_empty_span():
    a = find_zeros(1.5, 5.0, 2)[1]
    assert integrate_trajectory(a, 1.5, 5.0, 5.0) == a


def test_trajectory_requires_zero():
    with pytest.raises(PreconditionViolated):
        integrate_trajectory(-1.0, 1.5, 5.0, 6.0)


def test_trajectory_short_step_lands_on_zero():
    a0 = find_zeros(1.5, 5.0, 2)[1]
    a1 = integrate_trajectory(a0, 1.5, 5.0, 5.5)
    assert a1 > a0
    assert a1 == pytest.approx(find_zeros(1.5, 5.5, 2)[1], abs=1e-6)


def test_approx_trajectory_start_and_slope():
    a_k, b, z_l = -4.1, 1.5, 5.0
    assert approx_trajectory(a_k, b, z_l, z_l) == pytest.approx(a_k, abs=1e-14)
    h = 1e-5
    f1 = approx_trajectory(a_k, b, z_l, z_l + h)
    f2 = approx_trajectory(a_k, b, z_l, z_l + 2 * h)
    fd = (-3 * a_k + 4 * f1 - f2) / (2 * h)
    assert fd == pytest.approx(comparison_rhs(a_k, b, z_l), rel=1e-6)


def test_approx_trajectory_domain():
    with pytest.raises(DomainError):
        approx_trajectory(1.0, 1.5, 1.0, 2.0)
    with pytest.raises(DomainError):
        approx_trajectory(-1.0, 1.5, 2.0, 1.0)
