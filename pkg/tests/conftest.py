import mpmath
import pytest

from kummer_gap.first_passage import solve_threshold
from kummer_gap.zero_finder import find_zeros

ORACLE_DPS = 50


@pytest.fixture(scope="session")
def oracle():
    """mpmath at 50 digits, used only as an independent reference."""
    ctx = mpmath.mp.clone()
    ctx.dps = ORACLE_DPS
    return ctx


@pytest.fixture(scope="session")
def worked_y():
    return solve_threshold(1e-4, 3, 10.0)


@pytest.fixture(scope="session")
def worked_z(worked_y):
    return worked_y**2 / 2


@pytest.fixture(scope="session")
def worked_zeros(worked_z):
    return find_zeros(1.5, worked_z, 11)
