"""Lower bound on the spacing of adjacent parameter zeros, and where it is monotone."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import gmpy2
import numpy as np

from .errors import BracketFailure, DomainError
from .special_functions import xcontext

IMAG_TOL = 1e-9
FEASIBILITY_TOL = 1e-8
NEWTON_POLISH_STEPS = 2


@dataclass(frozen=True)
class GapBoundResult:
    a_k: float
    b: float
    z_l: float
    g_k: float
    beta_k: float
    bound: float
    precondition_ok: bool


@dataclass(frozen=True)
class MonotonicityThreshold:
    b: float
    sextic_coeffs: tuple[float, ...]  # ascending degree
    roots: tuple[complex, ...]
    a_bar_star: Optional[float]
    candidates: tuple[float, ...] = ()

    @property
    def present(self) -> bool:
        return self.a_bar_star is not None


def _radicand(a, b):
    r = (b - 2 * a) ** 2 - (b - 1) ** 2
    if r <= 0:
        raise DomainError(f"(b-2a)^2 - (b-1)^2 = {float(r)} must be positive")
    return r


def gap_factor(a: float, b: float) -> float:
    """g = exp(2 pi / sqrt((b-2a)^2 - (b-1)^2)) >= 1."""
    return math.exp(2 * math.pi / math.sqrt(_radicand(a, b)))


def z_ratio_lower_bound(a: float, b: float) -> float:
    """Lower bound on z_{l+1}/z_l for consecutive positive zeros of Phi(a, b, .)."""
    if a >= 0 or b - a - 1 <= 0:
        raise DomainError("ratio bound needs a < 0 and b - a - 1 > 0")
    return gap_factor(a, b)


def theorem1_value(a_k, b, z_l):
    """Gap bound beta - beta/(4g) [2 + sqrt(z_l/beta)(g-1)]^2 in extended precision."""
    with xcontext():
        a_k, b, z_l = gmpy2.mpfr(a_k), gmpy2.mpfr(b), gmpy2.mpfr(z_l)
        g = gmpy2.exp(2 * gmpy2.const_pi() / gmpy2.sqrt(_radicand(a_k, b)))
        beta = b - a_k - 1
        if beta <= 0:
            raise DomainError("beta_k = b - a_k - 1 must be positive")
        bracket = 2 + gmpy2.sqrt(z_l / beta) * (g - 1)
        return beta - beta / (4 * g) * bracket * bracket


def theorem1_bound(a_k: float, a_k_prev: float, b: float, z_l: float) -> GapBoundResult:
    """Guaranteed lower bound on a_k_prev - a_k, valid when ``precondition_ok``."""
    if not a_k < a_k_prev < 0:
        raise DomainError("need a_k < a_k_prev < 0")
    if b <= 0 or z_l <= 0:
        raise DomainError("need b > 0 and z_l > 0")
    g_k = gap_factor(a_k, b)
    beta_k = b - a_k - 1
    beta_prev = b - a_k_prev - 1
    precondition_ok = beta_prev > 0 and z_l < beta_prev / gap_factor(a_k_prev, b)
    return GapBoundResult(
        a_k=float(a_k),
        b=float(b),
        z_l=float(z_l),
        g_k=g_k,
        beta_k=beta_k,
        bound=float(theorem1_value(a_k, b, z_l)),
        precondition_ok=bool(precondition_ok),
    )


def beta_psi(a: float, b: float) -> float:
    """4 pi (b-1-a)(b-2a) / [(b-2a)^2 - (b-1)^2]^(3/2); the bound is monotone where this is < 1."""
    return 4 * math.pi * (b - 1 - a) * (b - 2 * a) / _radicand(a, b) ** 1.5


def sextic_coefficients(b: float) -> tuple[float, ...]:
    pi = math.pi
    c2 = (b - 1) ** 2
    return (c2 * (2 * b - 3), 0.0, b * b - 2, -c2 / pi, 1.0, -1 / pi, 1 / (4 * pi * pi))


def _polish(coeffs_desc, root: complex) -> complex:
    deriv = np.polyder(coeffs_desc)
    for _ in range(NEWTON_POLISH_STEPS):
        p = np.polyval(coeffs_desc, root)
        dp = np.polyval(deriv, root)
        if p == 0 or abs(dp) < 1e-300:
            break
        candidate = root - p / dp
        if abs(np.polyval(coeffs_desc, candidate)) >= abs(p):
            break
        root = candidate
    return root


def monotonicity_threshold(b: float) -> MonotonicityThreshold:
    """Deepest a_k below which the gap bound provably decreases; ``a_bar_star`` None when absent."""
    if b <= 0:
        raise DomainError("b must be positive")
    coeffs = sextic_coefficients(b)
    desc = np.array(coeffs[::-1])
    roots = tuple(complex(_polish(desc, r)) for r in np.roots(desc))
    survivors = []
    for y in roots:
        c = b / 2 - 0.5 * np.sqrt(complex((b - 1) ** 2 + y * y))
        if abs(c.imag) > IMAG_TOL:
            continue
        a_bar = c.real
        try:
            value = beta_psi(a_bar, b)
        except DomainError:
            continue
        if abs(value - 1) <= FEASIBILITY_TOL:
            survivors.append(a_bar)
    a_bar_star = min(survivors) if survivors else None
    return MonotonicityThreshold(float(b), coeffs, roots, a_bar_star, tuple(sorted(survivors)))


def _hat_lhs_minus_rhs(beta: float, b: float, z: float) -> float:
    prod = (2 * beta + 1) * (2 * beta - 2 * b + 3)
    if prod <= 0:
        return math.inf
    expo = 2 * math.pi / math.sqrt(prod)
    if expo > 700:
        return math.inf
    return z * math.exp(expo) - beta


def nu_hat_threshold(b: float, z: float, max_beta: float = 1e12) -> float:
    """nu_hat = b - beta_hat - 1 where z exp(2 pi / sqrt((2 beta+1)(2 beta-2b+3))) = beta_hat."""
    if b <= 0 or z <= 0:
        raise DomainError("need b > 0 and z > 0")
    lo = max(0.0, b - 1.5)
    lo = lo + 1e-12 * max(1.0, lo)
    if not _hat_lhs_minus_rhs(lo, b, z) > 0:
        raise BracketFailure("left end of the bracket is not above the line")
    hi = max(2 * lo, 1.0)
    while _hat_lhs_minus_rhs(hi, b, z) > 0:
        hi *= 2
        if hi > max_beta:
            raise BracketFailure(f"no sign change up to beta={max_beta}")
    while hi - lo > 1e-14 * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _hat_lhs_minus_rhs(mid, b, z) > 0:
            lo = mid
        else:
            hi = mid
    beta_hat = 0.5 * (lo + hi)
    return b - beta_hat - 1
