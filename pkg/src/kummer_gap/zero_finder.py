"""Zeros of Phi(nu, b, z) in the first parameter, z-domain zero counts, and zero trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import gmpy2
import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, PreconditionViolated, ScanExhausted, StepFailure
from .integrals import phi_vanishes, weighted_phi_sq_integral
from .special_functions import kummer_m, xcontext

SCAN_STEP = 0.05
DIP_RTOL = 1e-6
# Bisection runs to double-precision resolution, well inside the 1e-12 relative
# bracket callers rely on: the residue sums are sensitive to nu_1 at ~1e-14.
REFINE_RTOL = 4e-16
NU_SCAN_LIMIT = -2000.0
ODE_RTOL = 1e-8


@dataclass(frozen=True)
class ZeroSequence:
    """Zeros nu_1 > nu_2 > ... of Phi(., b, z), each with its final bisection bracket."""

    b: float
    z: float
    zeros: tuple[float, ...]
    refine_tol: float = REFINE_RTOL
    brackets: tuple[tuple[float, float], ...] = field(default=(), repr=False)

    def __len__(self) -> int:
        return len(self.zeros)

    def __getitem__(self, i):
        return self.zeros[i]

    def __iter__(self):
        return iter(self.zeros)

    def gaps(self) -> list[float]:
        return [hi - lo for hi, lo in zip(self.zeros[:-1], self.zeros[1:])]


def _signed(a, b, z):
    v = kummer_m(a, b, z, strict=False)
    return v.value, v.max_term_magnitude


def _bisect(f, lo: float, hi: float, f_lo, rtol: float, atol: float = 0.0):
    """Shrink a sign-change bracket [lo, hi] until its width is below rtol*max(1, |x|)."""
    while hi - lo > max(rtol * max(1.0, abs(lo), abs(hi)), atol):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = f(mid)
        if f_mid == 0:
            return mid, (mid, mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi), (lo, hi)


def _rescan(f, left: float, right: float, max_halvings: int = 7) -> list[tuple[float, float]]:
    """Rescan a same-sign step at successively halved spacing; brackets come back right to left."""
    for level in range(1, max_halvings + 1):
        pts = np.linspace(right, left, 2**level + 1)
        vals = [f(p) for p in pts]
        found = [
            (float(pts[i + 1]), float(pts[i]))
            for i in range(len(pts) - 1)
            if (vals[i] > 0) != (vals[i + 1] > 0)
        ]
        if found:
            return found
    return []


def iter_zeros(
    b: float, z: float, step: float = SCAN_STEP, nu_min: float = NU_SCAN_LIMIT
) -> Iterator[tuple[float, tuple[float, float]]]:
    """Yield ``(zero, bracket)`` for successive zeros of Phi(., b, z), scanning left from 0."""
    if b <= 0 or z <= 0:
        raise DomainError("zero scan needs b > 0 and z > 0")

    def f(nu):
        return _signed(nu, b, z)[0]

    # (nu, value, max_term) for the last two scan points, rightmost first
    prev = None
    right = 0.0
    f_right, m_right = _signed(right, b, z)
    k = 0
    while True:
        k += 1
        left = -k * step
        if left < nu_min:
            raise ScanExhausted(f"no further sign change above nu={nu_min}")
        f_left, m_left = _signed(left, b, z)
        brackets: list[tuple[float, float]] = []
        if (f_left > 0) != (f_right > 0):
            brackets.append((left, right))
        elif (
            prev is not None
            and (prev[1] > 0) == (f_right > 0)
            and abs(f_right) < min(abs(prev[1]), abs(f_left))
            and abs(f_right) / m_right < DIP_RTOL
        ):
            # |Phi| dips at `right` without a sign change on either side.
            brackets.extend(_rescan(f, left, prev[0]))
        for lo, hi in brackets:
            zero, bracket = _bisect(f, lo, hi, f(lo), REFINE_RTOL)
            yield zero, bracket
        prev = (right, f_right, m_right)
        right, f_right, m_right = left, f_left, m_left


def find_zeros(b: float, z: float, count: int, step: float = SCAN_STEP) -> ZeroSequence:
    """The ``count`` zeros of Phi(., b, z) nearest the origin."""
    if count < 1:
        raise DomainError("count must be positive")
    zeros, brackets = [], []
    for zero, bracket in iter_zeros(b, z, step):
        zeros.append(zero)
        brackets.append(bracket)
        if len(zeros) == count:
            break
    return ZeroSequence(float(b), float(z), tuple(zeros), REFINE_RTOL, tuple(brackets))


def z_scan_span(a: float, b: float) -> float:
    k = b / 2 - a
    return 4 * k * k + 4 * k + 4


def find_z_zeros(a: float, b: float, ratio: float = 1.005) -> list[float]:
    """Positive zeros of Phi(a, b, .) for fixed a < 0, located on a geometric z grid."""
    if a >= 0 or b <= 0:
        raise DomainError("z-zero scan needs a < 0 and b > 0")
    span = z_scan_span(a, b)
    grid = np.geomspace(span * 1e-7, span, int(math.log(1e7) / math.log(ratio)) + 1)

    def f(zz):
        return _signed(a, b, zz)[0]

    zeros = []
    prev_z, prev_f = grid[0], f(grid[0])
    for zz in grid[1:]:
        cur = f(zz)
        if cur == 0 or (cur > 0) != (prev_f > 0):
            zero, _ = _bisect(f, float(prev_z), float(zz), prev_f, 1e-14)
            zeros.append(zero)
        prev_z, prev_f = zz, cur
    # Past the last zero |Phi| must be growing; otherwise a crossing may lie beyond the span.
    end_val = f(span)
    with xcontext():
        slope = a / gmpy2.mpfr(b) * kummer_m(a + 1, b + 1, span, strict=False).value
    if end_val * slope < 0:
        raise ScanExhausted(f"Phi({a}, {b}, z) still heading to zero at z={span}")
    return zeros


def count_positive_z_zeros(a: float, b: float) -> int:
    """Number of positive z with Phi(a, b, z) = 0, counted by sign changes."""
    return len(find_z_zeros(a, b))


def trajectory_rhs(a_star, b, z, tol: float = 1e-10) -> float:
    """d a*/dz along a zero trajectory: (a/b)^2 z^b e^(-z) Phi(a+1,b+1,z)^2 / I(a,b,z)."""
    integral = weighted_phi_sq_integral(a_star, b, z, tol=tol).value
    with xcontext():
        a_, b_, z_ = gmpy2.mpfr(a_star), gmpy2.mpfr(b), gmpy2.mpfr(z)
        p1 = kummer_m(a_ + 1, b_ + 1, z_, strict=False).value
        return float((a_ / b_) ** 2 * z_**b_ * gmpy2.exp(-z_) * p1 * p1) / integral


def trajectory(
    a_start: float,
    b: float,
    z_start: float,
    z_end: float,
    z_eval: Sequence[float] | None = None,
    rtol: float = ODE_RTOL,
) -> np.ndarray:
    """Integrate the zero trajectory from a zero (z_start, a_start); values at ``z_eval`` (default: z_end)."""
    if z_end < z_start:
        raise DomainError("z_end must not precede z_start")
    if not phi_vanishes(a_start, b, z_start):
        raise PreconditionViolated("trajectory must start on a zero of Phi(., b, z_start)")
    points = np.atleast_1d(np.asarray(z_eval if z_eval is not None else [z_end], dtype=float))
    if z_end == z_start:
        return np.full(points.shape, float(a_start))
    sol = solve_ivp(
        lambda zz, y: [trajectory_rhs(y[0], b, zz)],
        (z_start, z_end),
        [float(a_start)],
        method="RK45",
        rtol=rtol,
        atol=rtol * 1e-2,
        dense_output=True,
    )
    if sol.status != 0:
        raise StepFailure(sol.message)
    return sol.sol(points)[0]


def integrate_trajectory(a_start: float, b: float, z_start: float, z_end: float) -> float:
    """a*(z_end) for the trajectory through the zero a_start of Phi(., b, z_start)."""
    return float(trajectory(a_start, b, z_start, z_end)[0])


def comparison_rhs(a: float, b: float, z: float) -> float:
    """Lower bound h(a, z) = beta/z - sqrt(beta/z), beta = -1 - a + b, on the trajectory slope."""
    beta = -1 - a + b
    if beta <= 0:
        raise DomainError("-1 - a + b must be positive")
    return beta / z - math.sqrt(beta / z)


def approx_trajectory(a_k: float, b: float, z_l: float, z: float) -> float:
    """Closed-form solution of a' = comparison_rhs(a, b, z) with a(z_l) = a_k."""
    beta = -1 - a_k + b
    if beta <= 0:
        raise DomainError("-1 - a_k + b must be positive")
    if z_l <= 0 or z < z_l:
        raise DomainError("need z >= z_l > 0")
    inner = math.sqrt(z_l / z) * (2 * math.sqrt(beta) - math.sqrt(z_l)) + math.sqrt(z)
    return -1 + b - 0.25 * inner * inner
