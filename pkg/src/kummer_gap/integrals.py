"""Weighted integrals of Phi^2 and the closed forms/bounds that pin them down.

The central object is

    I(a, b, z) = int_0^z t^(b-1) e^(-t) Phi(a, b, t)^2 dt,

computed by adaptive quadrature.  The closed forms below hold exactly and are
used as independent checks on the quadrature; the bounds are the ones the gap
and truncation estimates are built from.
"""

from __future__ import annotations

import gmpy2

from .errors import DegenerateParameters, DomainError, PreconditionViolated
from .quadrature import IntegralResult, graded_breakpoints, integrate
from .special_functions import _series, kummer_m, xcontext

DEFAULT_TOL = 1e-10
ZERO_RTOL = 1e-9


def phi_vanishes(a, b, z, rtol: float = ZERO_RTOL) -> bool:
    """Scale-aware zero test: |Phi(a,b,z)| <= rtol * (largest series term)."""
    val = kummer_m(a, b, z, strict=False)
    return abs(val.value) <= rtol * val.max_term_magnitude


def _require_zero(a, b, z) -> None:
    if not phi_vanishes(a, b, z):
        raise PreconditionViolated(f"Phi({a}, {b}, {z}) is not a zero of the first parameter")


def _phi_sq_integrand(a, b_weight, b_phi):
    # t^(b_weight-1) e^(-t) Phi(a, b_phi, t)^2 ; runs inside xcontext
    power = b_weight - 1

    def f(t):
        s = _series(a, b_phi, t)[0]
        return t ** power * gmpy2.exp(-t) * s * s

    return f


def weighted_phi_sq_integral(a, b, z, tol: float = DEFAULT_TOL) -> IntegralResult:
    """I(a, b, z) = int_0^z t^(b-1) e^(-t) Phi(a, b, t)^2 dt."""
    if b <= 0 or z <= 0 or tol <= 0:
        raise DomainError("weighted_phi_sq_integral needs b > 0, z > 0, tol > 0")
    with xcontext():
        a_ = gmpy2.mpfr(a)
        b_ = gmpy2.mpfr(b)
        f = _phi_sq_integrand(a_, b_, b_)
        return integrate(f, graded_breakpoints(z, float(b)), tol=tol)


def product_integral(xi, eta, b, z, tol: float = DEFAULT_TOL) -> IntegralResult:
    """Quadrature of int_0^z t^(b-1) e^(-t) Phi(xi,b,t) Phi(eta,b,t) dt."""
    with xcontext():
        xi_, eta_, b_ = gmpy2.mpfr(xi), gmpy2.mpfr(eta), gmpy2.mpfr(b)
        power = b_ - 1

        def f(t):
            return t ** power * gmpy2.exp(-t) * _series(xi_, b_, t)[0] * _series(eta_, b_, t)[0]

        # Absolute floor guards the near-orthogonal case where the integral is tiny.
        scale = integrate(
            lambda t: abs(f(t)), graded_breakpoints(z, float(b)), tol=1e-3
        ).value
        return integrate(f, graded_breakpoints(z, float(b)), tol=tol, abs_tol=tol * 1e-2 * scale)


def product_integral_closed_form(xi, eta, b, z) -> float:
    """Closed form of int_0^z t^(b-1) e^(-t) Phi(xi,b,t) Phi(eta,b,t) dt for xi != eta."""
    if xi == eta:
        raise DegenerateParameters("closed form needs xi != eta")
    if b <= 0 or z <= 0:
        raise DomainError("closed form needs b > 0, z > 0")
    with xcontext():
        xi, eta, b, z = (gmpy2.mpfr(v) for v in (xi, eta, b, z))
        pre = gmpy2.exp(-z) * z**b / (b * (eta - xi))
        p_xi = kummer_m(xi, b, z, strict=False).value
        p_eta = kummer_m(eta, b, z, strict=False).value
        p_eta1 = kummer_m(eta + 1, b + 1, z, strict=False).value
        p_xi1 = kummer_m(xi + 1, b + 1, z, strict=False).value
        return float(pre * (eta * p_xi * p_eta1 - xi * p_eta * p_xi1))


def self_integral(a, b, z, tol: float = DEFAULT_TOL) -> IntegralResult:
    """Quadrature of int_0^z (k/t - 1/2) e^(-t) t^b Phi(a,b,t)^2 dt with k = b/2 - a."""
    with xcontext():
        a_, b_ = gmpy2.mpfr(a), gmpy2.mpfr(b)
        k = b_ / 2 - a_
        power = b_ - 1

        def f(t):
            s = _series(a_, b_, t)[0]
            return (k - t / 2) * t**power * gmpy2.exp(-t) * s * s

        scale = integrate(
            lambda t: abs(f(t)), graded_breakpoints(z, float(b)), tol=1e-3
        ).value
        return integrate(f, graded_breakpoints(z, float(b)), tol=tol, abs_tol=tol * 1e-2 * scale)


def self_integral_closed_form(a, b, z) -> float:
    """Closed form of int_0^z (k/t - 1/2) e^(-t) t^b Phi(a,b,t)^2 dt, k = b/2 - a.

    Valid for every real ``a``; at a zero of Phi(., b, z) only the
    Phi(a+1, b+1, z)^2 term survives.
    """
    if b <= 0 or z <= 0:
        raise DomainError("closed form needs b > 0, z > 0")
    with xcontext():
        a, b, z = gmpy2.mpfr(a), gmpy2.mpfr(b), gmpy2.mpfr(z)
        k = b / 2 - a
        p = kummer_m(a, b, z, strict=False).value
        p1 = kummer_m(a + 1, b + 1, z, strict=False).value
        ez = gmpy2.exp(-z)
        first = z ** (b + 1) * ez * ((2 * k - b + 1) / (2 * z) * p * p + (a / b) ** 2 * p1 * p1)
        second = z**b * ez * (a / b) * (b - z - 1) * p * p1
        return float(first + second)


def integral_at_zero_decomposition(a, b, z, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Split I at a zero ``a`` into its two nonnegative pieces.

    Returns ``(boundary, remainder)`` with
    I = boundary + remainder, boundary = 2 z^(b+1) e^(-z) (a/b)^2 Phi(a+1,b+1,z)^2 / (b - 2a)
    and remainder = int_0^z e^(-t) t^b Phi(a,b,t)^2 dt / (b - 2a).
    """
    _require_zero(a, b, z)
    with xcontext():
        a_, b_, z_ = gmpy2.mpfr(a), gmpy2.mpfr(b), gmpy2.mpfr(z)
        p1 = kummer_m(a_ + 1, b_ + 1, z_, strict=False).value
        boundary = 2 / (b_ - 2 * a_) * z_ ** (b_ + 1) * gmpy2.exp(-z_) * (a_ / b_) ** 2 * p1 * p1
        f = _phi_sq_integrand(a_, b_ + 1, b_)
        rest = integrate(f, [0, z], tol=tol).value / float(b_ - 2 * a_)
        return float(boundary), rest


def integral_recursion_rhs(a, b, z, tol: float = DEFAULT_TOL) -> float:
    """Right-hand side of the b -> b-1 recursion for I at a zero ``a``:
    (b-1)^2 / (-1-a+b) * int_0^z t^(b-2) e^(-t) Phi(a, b-1, t)^2 dt.
    """
    if b <= 1:
        raise DomainError("recursion needs b > 1")
    if -1 - a + b == 0:
        raise DomainError("recursion is singular at -1 - a + b == 0")
    _require_zero(a, b, z)
    with xcontext():
        a_, b_ = gmpy2.mpfr(a), gmpy2.mpfr(b)
        f = _phi_sq_integrand(a_, b_ - 1, b_ - 1)
        inner = integrate(f, graded_breakpoints(z, float(b) - 1), tol=tol).value
        return float((b_ - 1) ** 2 / (-1 - a_ + b_)) * inner


def integral_upper_bound(a, b, z) -> float:
    """Upper bound on I at a zero ``a`` when z < -1 - a + b."""
    if a >= 0 or b <= 0 or z <= 0:
        raise DomainError("upper bound needs a < 0, b > 0, z > 0")
    beta = -1 - a + b
    if z >= beta:
        raise PreconditionViolated(f"upper bound needs z < -1-a+b = {beta}")
    _require_zero(a, b, z)
    with xcontext():
        a_, b_, z_ = gmpy2.mpfr(a), gmpy2.mpfr(b), gmpy2.mpfr(z)
        beta_ = -1 - a_ + b_
        p = kummer_m(a_ + 1, b_, z_, strict=False).value
        num = a_ * a_ * gmpy2.exp(-z_) * z_ ** (b_ - 1) * p * p
        return float(num / (beta_ - gmpy2.sqrt(z_ * beta_)))


def integral_lower_bound(a, b, z) -> float:
    """Lower bound on I at a zero ``a``: drop the nonnegative remainder term."""
    if a >= 0 or b <= 0 or z <= 0:
        raise DomainError("lower bound needs a < 0, b > 0, z > 0")
    _require_zero(a, b, z)
    with xcontext():
        a_, b_, z_ = gmpy2.mpfr(a), gmpy2.mpfr(b), gmpy2.mpfr(z)
        p1 = kummer_m(a_ + 1, b_ + 1, z_, strict=False).value
        return float(
            2 * a_ * a_ * gmpy2.exp(-z_) * z_ ** (b_ + 1) * p1 * p1 / (b_ * b_ * (b_ - 2 * a_))
        )


def dphi_da(a, b, z, h: float = 1e-8):
    """Central difference of Phi in its first parameter, in extended precision."""
    with xcontext():
        a_, h_ = gmpy2.mpfr(a), gmpy2.mpfr(h)
        up = kummer_m(a_ + h_, b, z, strict=False).value
        down = kummer_m(a_ - h_, b, z, strict=False).value
        return (up - down) / (2 * h_)


def integral_via_parameter_derivative(a, b, z) -> float:
    """I at a zero ``a`` from -(a z^b / b) e^(-z) Phi(a+1, b+1, z) dPhi/da."""
    with xcontext():
        a_, b_, z_ = gmpy2.mpfr(a), gmpy2.mpfr(b), gmpy2.mpfr(z)
        p1 = kummer_m(a_ + 1, b_ + 1, z_, strict=False).value
        return float(-(a_ * z_**b_ / b_) * gmpy2.exp(-z_) * p1 * dphi_da(a, b, z))
