"""False-alarm probability of the m-dimensional Wiener first-passage test.

The exact probability is a residue series over the zeros nu_k of
Phi(nu, m/2, y^2/2).  Keeping N residues gives an upper bound; the gap bound
on the discarded zeros turns the geometric tail into a certified lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

import gmpy2

from .errors import AbsentThreshold, BracketFailure, DomainError
from .gap_bounds import monotonicity_threshold, nu_hat_threshold, theorem1_value
from .integrals import _require_zero, weighted_phi_sq_integral
from .special_functions import kummer_m, regularized_gamma_q, xcontext
from .zero_finder import ZeroSequence, iter_zeros

THRESHOLD_Y_MAX = 60.0
THRESHOLD_SCAN_STEP = 0.25
# The first pole term nearly cancels the leading terms (P_fa ~ 1e-4 out of ~1),
# so the residue integrals are taken well past the default quadrature tolerance.
PFA_INTEGRAL_TOL = 1e-14


def approx_pfa(y: float, m: int, n: float) -> float:
    """Large-threshold approximation of the false-alarm probability."""
    if y <= 0 or n <= 1:
        raise DomainError("need y > 0 and n > 1")
    lead = math.exp(-y * y / 2) * y**m / (math.gamma(m / 2) * 2 ** (m / 2))
    return lead * (math.log(n) * (1 - m / y**2) + 4 / y**2)


def solve_threshold(p_des: float, m: int, n: float) -> float:
    """Largest y with approx_pfa(y, m, n) = p_des (the decreasing tail branch)."""
    if not 0 < p_des < 0.5:
        raise DomainError("p_des must lie in (0, 0.5)")
    hi = THRESHOLD_Y_MAX
    if approx_pfa(hi, m, n) >= p_des:
        raise BracketFailure("approximation still above p_des at the scan ceiling")
    lo = hi
    while approx_pfa(lo, m, n) < p_des:
        hi = lo
        lo -= THRESHOLD_SCAN_STEP
        if lo <= 0:
            raise BracketFailure("approximation never reaches p_des")
    while hi - lo > 4e-16 * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if approx_pfa(mid, m, n) >= p_des:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FirstPassageProblem:
    """One (m, n, p_des, N) instance; ``y`` defaults to the solved threshold."""

    m: int
    n: float
    p_fa_desired: float
    N: int = 3
    y_override: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 1 or self.n <= 1 or self.N < 1:
            raise DomainError("need m >= 1, n > 1, N >= 1")
        if not 0 < self.p_fa_desired < 1:
            raise DomainError("p_fa_desired must lie in (0, 1)")

    @cached_property
    def y(self) -> float:
        if self.y_override is not None:
            return float(self.y_override)
        return solve_threshold(self.p_fa_desired, self.m, self.n)

    @property
    def b(self) -> float:
        return self.m / 2

    @property
    def z(self) -> float:
        return self.y**2 / 2

    @property
    def u(self) -> float:
        return math.log(self.n)


@dataclass(frozen=True)
class PfaInterval:
    upper: float
    eps_bar: float
    lower: float  # max(0, upper - eps_bar)
    delta: float
    zeros_used: ZeroSequence
    p_fa_desired: float = math.nan

    @property
    def percent_difference(self) -> float:
        """100 * max |endpoint - p_des| / p_des."""
        worst = max(abs(self.upper - self.p_fa_desired), abs(self.lower - self.p_fa_desired))
        return 100 * worst / self.p_fa_desired


class Algorithm1Result(NamedTuple):
    delta: float
    zeros: ZeroSequence
    nu_hat: float
    a_bar_star: Optional[float]
    delta_inf: float


def residue_at_zero(b: float, z: float) -> float:
    """Residue of e^(nu u) G(nu) at nu = 0: Phi(1, b+1, z)."""
    if b <= 0 or z < 0:
        raise DomainError("need b > 0, z >= 0")
    return float(kummer_m(1, b + 1, z).value)


def residue_at_pole(nu_k: float, b: float, z: float, u: float, integral: Optional[float] = None) -> float:
    """Residue of e^(nu u) G(nu) at a zero nu_k of Phi(., b, z); always negative."""
    if u < 0:
        raise DomainError("u must be nonnegative")
    _require_zero(nu_k, b, z)
    if integral is None:
        integral = weighted_phi_sq_integral(nu_k, b, z, tol=PFA_INTEGRAL_TOL).value
    with xcontext():
        nu, b_, z_ = gmpy2.mpfr(nu_k), gmpy2.mpfr(b), gmpy2.mpfr(z)
        u = gmpy2.mpfr(float(u))
        p1 = kummer_m(nu + 1, b_ + 1, z_, strict=False).value
        return float(-(z_**b_) * gmpy2.exp(nu * u - z_) / b_ * p1 * p1 / gmpy2.mpfr(integral))


def pole_terms(problem: FirstPassageProblem, zeros) -> list[float]:
    """Positive per-zero contributions removed from the first two terms of the exact series."""
    b, z, n = problem.b, problem.z, problem.n
    out = []
    with xcontext():
        b_, z_ = gmpy2.mpfr(b), gmpy2.mpfr(z)
        scale = z_ ** (2 * b_) * gmpy2.exp(-2 * z_) / (b_ * b_ * gmpy2.gamma(b_))
        log_n = gmpy2.log(gmpy2.mpfr(n))
    for nu in zeros:
        integral = weighted_phi_sq_integral(nu, b, z, tol=PFA_INTEGRAL_TOL).value
        with xcontext():
            nu_ = gmpy2.mpfr(nu)
            p1 = kummer_m(nu_ + 1, b_ + 1, z_, strict=False).value
            out.append(float(scale * gmpy2.exp(nu_ * log_n) * p1 * p1 / gmpy2.mpfr(integral)))
    return out


def pfa_leading(problem: FirstPassageProblem) -> float:
    """Gamma(b,z)/Gamma(b) + z^b e^-z Phi(1,b+1,z) / (b Gamma(b)): the series with no poles kept."""
    b, z = problem.b, problem.z
    with xcontext():
        b_, z_ = gmpy2.mpfr(b), gmpy2.mpfr(z)
        second = z_**b_ * gmpy2.exp(-z_) / (b_ * gmpy2.gamma(b_)) * kummer_m(1, b_ + 1, z_).value
    return regularized_gamma_q(b, z) + float(second)


def pfa_upper(problem: FirstPassageProblem, zeros, N: Optional[int] = None) -> float:
    """Upper bound on P_fa from the first N residues (N defaults to ``problem.N``; N=0 allowed)."""
    count = problem.N if N is None else N
    if len(zeros) < count:
        raise DomainError(f"need at least {count} zeros, got {len(zeros)}")
    return pfa_leading(problem) - math.fsum(pole_terms(problem, list(zeros)[:count]))


def truncation_bound(problem: FirstPassageProblem, nu_N: float, delta: float) -> float:
    """Upper bound on the residue tail beyond nu_N given a uniform zero-gap bound ``delta``."""
    if nu_N >= 0 or delta <= 0:
        raise DomainError("need nu_N < 0 and delta > 0")
    b, z, n = problem.b, problem.z, problem.n
    with xcontext():
        b_, z_, nu, d = gmpy2.mpfr(b), gmpy2.mpfr(z), gmpy2.mpfr(nu_N), gmpy2.mpfr(delta)
        log_n = gmpy2.log(gmpy2.mpfr(n))
        denom_geo = gmpy2.expm1(d * log_n)
        if denom_geo <= 0:
            raise DomainError("n^delta must exceed 1")
        num = z_ ** (b_ - 1) * gmpy2.exp(-z_) * (b_ - 2 * nu) * gmpy2.exp(nu * log_n)
        return float(num / (2 * nu * nu * gmpy2.gamma(b_) * denom_geo))


def algorithm1_delta(problem: FirstPassageProblem, require_threshold: bool = False) -> Algorithm1Result:
    """Uniform lower bound on the zero gaps beyond nu_N, accumulating zeros until the gap bound applies."""
    b, z, N = problem.b, problem.z, problem.N
    nu_hat = nu_hat_threshold(b, z)
    a_bar_star = monotonicity_threshold(b).a_bar_star
    if a_bar_star is None and require_threshold:
        raise AbsentThreshold(f"no monotonicity threshold for b={b}")
    # An absent threshold leaves the gate at 0, which every zero already satisfies.
    gate = a_bar_star if a_bar_star is not None else 0.0

    scan = iter_zeros(b, z)
    nu = [math.nan]  # 1-based to mirror the zero labels
    brackets = [None]
    for _ in range(2):
        zero, bracket = next(scan)
        nu.append(zero)
        brackets.append(bracket)
    gaps = {1: nu[1] - nu[2]}
    i = 2
    while nu[i - 1] >= nu_hat or nu[i] >= gate or i < N + 1:
        zero, bracket = next(scan)
        nu.append(zero)
        brackets.append(bracket)
        gaps[i] = nu[i] - nu[i + 1]
        i += 1
    k = len(nu) - 1
    delta_inf = float(theorem1_value(nu[k], b, z))
    delta = min([gaps[j] for j in range(N, k - 1)] + [delta_inf])
    zeros = ZeroSequence(b, z, tuple(nu[1:]), brackets=tuple(brackets[1:]))
    return Algorithm1Result(delta, zeros, nu_hat, a_bar_star, delta_inf)


def pfa_interval(problem: FirstPassageProblem) -> PfaInterval:
    """Certified interval [P_u - eps_bar, P_u] for the false-alarm probability.

    The lower end is clamped at 0: for shallow nu_N (e.g. N=1, nu_1 ~ -4e-5)
    eps_bar is valid but exceeds P_u by orders of magnitude.
    """
    result = algorithm1_delta(problem)
    upper = pfa_upper(problem, result.zeros)
    eps_bar = truncation_bound(problem, result.zeros[problem.N - 1], result.delta)
    return PfaInterval(
        upper=upper,
        eps_bar=eps_bar,
        lower=max(0.0, upper - eps_bar),
        delta=result.delta,
        zeros_used=result.zeros,
        p_fa_desired=problem.p_fa_desired,
    )
