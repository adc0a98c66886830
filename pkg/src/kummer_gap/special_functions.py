"""Extended-precision confluent hypergeometric function and friends.

All arithmetic runs on ``gmpy2.mpfr`` values at 113 bits (IEEE binary128,
about 34 significant decimal digits).  The Kummer series for large negative
``a`` is alternating and loses roughly ``log10(max_term / |value|)`` digits to
cancellation, so every evaluation reports that loss alongside the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import gmpy2

from .errors import DomainError, PoleEmbedded, PrecisionExhausted

PRECISION_BITS = 113
WORKING_DIGITS = int(PRECISION_BITS * math.log10(2))  # 34
CANCELLATION_BUDGET = WORKING_DIGITS - 12
EPS_REL = 1e-25
MAX_TERMS = 100_000

RealX = type(gmpy2.mpfr(0))
Real = Union[float, int, str, RealX]

_ULP = 2.0 ** -PRECISION_BITS


def xcontext():
    """Context manager switching the current thread to working precision."""
    return gmpy2.context(precision=PRECISION_BITS)


def from_double(x: Real) -> RealX:
    with xcontext():
        return gmpy2.mpfr(x)


def as_double(x: Real) -> float:
    return float(x)


@dataclass(frozen=True)
class KummerValue:
    """Value of Phi(a, b, z) together with its cancellation diagnostics."""

    value: RealX
    max_term_magnitude: RealX
    cancellation_digits: float
    terms_used: int

    @property
    def reliable(self) -> bool:
        return self.cancellation_digits <= CANCELLATION_BUDGET

    @property
    def abs_error_bound(self) -> float:
        """Crude rounding bound: a few ulps of the largest term per term summed."""
        return float(self.max_term_magnitude) * _ULP * 4 * self.terms_used

    def __float__(self) -> float:
        return float(self.value)


def _check_b(b) -> None:
    if b <= 0 and b == int(b):
        raise PoleEmbedded(f"b={float(b)!r} is a nonpositive integer")


def pochhammer(x: Real, n: int) -> RealX:
    """Rising factorial (x)_n = x (x+1) ... (x+n-1)."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    with xcontext():
        x = gmpy2.mpfr(x)
        out = gmpy2.mpfr(1)
        for i in range(n):
            out *= x + i
        return out


def _series(a, b, z):
    # Caller must hold xcontext(); a, b, z already mpfr.
    term = gmpy2.mpfr(1)
    total = gmpy2.mpfr(1)
    max_term = gmpy2.mpfr(1)
    peak = 0
    quiet = 0
    n = 0
    a_cross = -a if a < 0 else 0
    while True:
        if a + n == 0:
            # (a)_{n+1} vanishes: polynomial case, n+1 nonzero terms in total
            return total, max_term, n + 1
        term = term * (a + n) * z / ((b + n) * (n + 1))
        n += 1
        total += term
        mag = abs(term)
        if mag > max_term:
            max_term = mag
            peak = n
        if n > peak and n > a_cross and n > z:
            if mag <= EPS_REL * abs(total) or mag <= max_term * _ULP:
                quiet += 1
                if quiet >= 3:
                    return total, max_term, n + 1
            else:
                quiet = 0
        if n >= MAX_TERMS:
            raise PrecisionExhausted(f"Kummer series did not converge in {MAX_TERMS} terms")


def _diagnose(total, max_term, terms) -> KummerValue:
    if total == 0:
        digits = math.inf
    else:
        digits = max(0.0, float(gmpy2.log10(max_term / abs(total))))
    return KummerValue(total, max_term, digits, terms)


def kummer_m(a: Real, b: Real, z: Real, *, strict: bool = True) -> KummerValue:
    """Kummer's confluent hypergeometric function Phi(a, b, z) = M(a, b, z).

    Summed directly from the power series.  With ``strict`` (the default) a
    result whose cancellation exceeds the precision budget raises
    :class:`PrecisionExhausted`; otherwise it is returned with
    ``reliable == False`` so callers that only need absolute accuracy on the
    scale of ``max_term_magnitude`` (sign tests, zero refinement, quadrature
    near zeros) can still use it.
    """
    with xcontext():
        a = gmpy2.mpfr(a)
        b = gmpy2.mpfr(b)
        z = gmpy2.mpfr(z)
        _check_b(b)
        result = _diagnose(*_series(a, b, z))
    if strict and not result.reliable:
        raise PrecisionExhausted(
            f"Phi({float(a)}, {float(b)}, {float(z)}) lost "
            f"{result.cancellation_digits:.1f} digits (budget {CANCELLATION_BUDGET})"
        )
    return result


def kummer_m_dz(a: Real, b: Real, z: Real, *, strict: bool = True) -> RealX:
    """d/dz Phi(a, b, z) = (a/b) Phi(a+1, b+1, z)."""
    with xcontext():
        a = gmpy2.mpfr(a)
        b = gmpy2.mpfr(b)
        _check_b(b)
        if a == 0:
            return gmpy2.mpfr(0)
        inner = kummer_m(a + 1, b + 1, z, strict=strict)
        return a / b * inner.value


def phi(a: Real, b: Real, z: Real) -> RealX:
    """Bare Phi(a, b, z) value without the precision guard (internal use)."""
    return kummer_m(a, b, z, strict=False).value


def regularized_gamma_q(b: Real, z: Real) -> float:
    """Regularized upper incomplete gamma Q(b, z) = Gamma(b, z) / Gamma(b)."""
    if b <= 0:
        raise DomainError("regularized_gamma_q needs b > 0")
    if z < 0:
        raise DomainError("regularized_gamma_q needs z >= 0")
    with xcontext():
        b = gmpy2.mpfr(b)
        z = gmpy2.mpfr(z)
        if z == 0:
            return 1.0
        log_prefactor = b * gmpy2.log(z) - z - gmpy2.lngamma(b)
        if z < b + 1:
            return float(1 - gmpy2.exp(log_prefactor) * _lower_series(b, z))
        return float(gmpy2.exp(log_prefactor) * _upper_fraction(b, z))


def _lower_series(b, z):
    # sum_n z^n / (b (b+1) ... (b+n)); gives P = prefactor * sum
    term = 1 / b
    total = term
    n = 0
    while abs(term) > abs(total) * EPS_REL:
        n += 1
        term = term * z / (b + n)
        total += term
        if n > MAX_TERMS:
            raise PrecisionExhausted("incomplete gamma series did not converge")
    return total


def _upper_fraction(b, z):
    # Modified Lentz evaluation of the Legendre continued fraction for Q.
    tiny = gmpy2.mpfr("1e-300")
    bn = z + 1 - b
    c = 1 / tiny
    d = 1 / bn
    h = d
    for i in range(1, MAX_TERMS):
        an = -i * (i - b)
        bn += 2
        d = an * d + bn
        if abs(d) < tiny:
            d = tiny
        c = bn + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < EPS_REL:
            return h
    raise PrecisionExhausted("incomplete gamma continued fraction did not converge")


def gamma(x: Real) -> RealX:
    with xcontext():
        return gmpy2.gamma(gmpy2.mpfr(x))
