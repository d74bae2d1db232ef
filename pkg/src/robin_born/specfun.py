"""Special functions for the closed-form Born terms.

Error functions are evaluated in double precision from their power series
(small argument) and a continued fraction for the scaled complementary error
function (large argument). The Kummer function is specialised to the
half-integer lattice ``b in {1/2, 3/2}`` reached by the Born terms, where it
is generated by a downward recurrence in ``a`` seeded from elementary closed
forms. Deep recurrences run in extended precision through :mod:`mpmath`.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

SQRT_PI = math.sqrt(math.pi)
TWO_OVER_SQRT_PI = 2.0 / SQRT_PI

SERIES_RTOL = 1e-17
SERIES_MAX_TERMS = 500

# erf from the positive series below this |x|, erfc from the continued fraction above
_ERF_SERIES_MAX = 3.0
_ERFC_CF_MIN = 0.7

# recurrence depth (in steps of a by 1/2) beyond which extended precision is used
EXTENDED_DEPTH = 20
EXTENDED_DPS = 30


class DomainError(ValueError):
    pass


class SingularRecurrenceError(ZeroDivisionError):
    pass


class SeriesConvergenceError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# error functions


def erf_alternating_series(x: float) -> float:
    """Maclaurin series of erf; cancels badly once |x| exceeds ~2."""
    x2 = x * x
    term = x
    total = x
    for n in range(1, SERIES_MAX_TERMS):
        term *= -x2 / n
        contrib = term / (2 * n + 1)
        total += contrib
        if abs(contrib) < SERIES_RTOL * abs(total):
            break
    return TWO_OVER_SQRT_PI * total


def erf_positive_series(x: float) -> float:
    """erf(x) = 2/sqrt(pi) exp(-x^2) sum 2^n x^(2n+1) / (2n+1)!!, all terms of one sign."""
    x2 = x * x
    term = x
    total = x
    for n in range(1, SERIES_MAX_TERMS):
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
        if abs(term) < SERIES_RTOL * abs(total):
            break
    return TWO_OVER_SQRT_PI * math.exp(-x2) * total


def _erfcx_cf(x: float) -> float:
    # erfcx(x) = 1/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0; modified Lentz
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for k in range(1, 20000):
        a = 0.5 * k
        d = x + a * d
        d = 1.0 / (d if d != 0.0 else tiny)
        c = x + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return 1.0 / (SQRT_PI * f)


def _exp_neg_square(x: float) -> float:
    # exp(-x^2) with x^2 split as xh^2 + (x - xh)(x + xh), xh^2 exact
    xh = math.floor(x * 16.0) / 16.0
    return math.exp(-xh * xh) * math.exp(-(x - xh) * (x + xh))


def erf(x: float) -> float:
    if x == 0.0:
        return 0.0
    ax = abs(x)
    if ax <= _ERF_SERIES_MAX:
        value = erf_positive_series(ax)
    else:
        value = 1.0 - _exp_neg_square(ax) * _erfcx_cf(ax)
    return math.copysign(value, x)


def erfc(x: float) -> float:
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x < _ERFC_CF_MIN:
        return 1.0 - erf(x)
    return _exp_neg_square(x) * _erfcx_cf(x)


def erfcx(x: float) -> float:
    """Scaled complementary error function exp(x^2) erfc(x)."""
    if x < 0.0:
        return 2.0 * math.exp(x * x) - erfcx(-x)
    if x < _ERFC_CF_MIN:
        return math.exp(x * x) * (1.0 - erf(x))
    return _erfcx_cf(x)


# ---------------------------------------------------------------------------
# Beta function and double factorial


def beta_fn(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError(f"Beta function needs positive arguments, got ({a}, {b})")
    if a + b < 170:
        return math.gamma(a) * math.gamma(b) / math.gamma(a + b)
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def double_factorial(k: int) -> int:
    """k!! with (-1)!! = 0!! = 1."""
    if k < -1:
        raise DomainError(f"double factorial undefined for k={k}")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


# ---------------------------------------------------------------------------
# Kummer confluent hypergeometric function 1F1(a, b; z)


def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


def kummer_recurrence(a, b, z, f_a, f_a_plus1):
    """Step down in ``a``: return 1F1(a-1, b; z) from 1F1(a, b; z) and 1F1(a+1, b; z)."""
    if a == b:
        raise SingularRecurrenceError(f"recurrence singular at a = b = {b}")
    return ((2 * a - b + z) * f_a - a * f_a_plus1) / (a - b)


def kummer_closed_form(a: float, b: float, x, *, ctx=None):
    """Elementary form of 1F1(a, b; -x), x >= 0, for the eight seed cases.

    Returns ``None`` when (a, b) is not one of them. With ``ctx=mpmath.mp`` the
    evaluation happens at the context's working precision.
    """
    if ctx is None:
        exp, sqrt, erf_, pi = math.exp, math.sqrt, erf, math.pi
    else:
        exp, sqrt, erf_, pi = ctx.exp, ctx.sqrt, ctx.erf, ctx.pi
        x = ctx.mpf(x)
    if a == 0:
        return 1 if ctx is None else ctx.mpf(1)
    if b == 0.5:
        if a == -0.5:
            return exp(-x) + sqrt(pi * x) * erf_(sqrt(x))
        if a == -1:
            return 1 + 2 * x
        if a == -1.5:
            return (1 + x) * exp(-x) + sqrt(pi * x) * (x + 1.5) * erf_(sqrt(x))
    elif b == 1.5:
        if a == 0.5:
            if x == 0:
                return x + 1
            return 0.5 * sqrt(pi / x) * erf_(sqrt(x))
        if a == -0.5:
            if x == 0:
                return x + 1
            rx = sqrt(x)
            return exp(-x) / 2 + (sqrt(pi) * rx / 2) * (1 + 1 / (2 * x)) * erf_(rx)
        if a == -1:
            return 1 + 2 * x / 3
    return None


LATTICE_TOP = {0.5: 0.0, 1.5: 0.5}


def kummer_lattice(b: float, x, count: int, *, ctx=None) -> list:
    """Values 1F1(top - k/2, b; -x) for k = 0..count-1, x >= 0.

    ``top`` is 0 for b = 1/2 and 1/2 for b = 3/2, so the sequence covers the
    arguments (1-n)/2 and 1-n/2 of the Born terms for n = 1, 2, ... The two
    interleaved chains (a integer / a half-integer) are each stepped down by
    one with :func:`kummer_recurrence` from the four closed-form seeds.
    """
    if b not in LATTICE_TOP:
        raise DomainError(f"lattice defined for b in {{1/2, 3/2}}, got {b}")
    top = LATTICE_TOP[b]
    if ctx is not None:
        x = ctx.mpf(x)
    z = -x
    out = []
    for k in range(count):
        a = top - 0.5 * k
        if k < 4:
            out.append(kummer_closed_form(a, b, x, ctx=ctx))
        else:
            # a_k = a_{k-2} - 1
            a_up = a + 1
            out.append(kummer_recurrence(a_up, b, z, out[k - 2], out[k - 4]))
    return out


def kummer_series(a, b, z, *, ctx=None):
    """Direct Maclaurin series; exact finite sum when ``a`` is a nonpositive integer."""
    one = 1 if ctx is None else ctx.mpf(1)
    term = one
    total = one
    tol = SERIES_RTOL if ctx is None else ctx.eps
    terminating = _is_nonpositive_int(float(a))
    n_max = int(-a) if terminating else SERIES_MAX_TERMS
    for n in range(n_max):
        term *= (a + n) * z / ((b + n) * (n + 1))
        total += term
        if not terminating and abs(term) <= tol * abs(total):
            return total
    if not terminating:
        raise SeriesConvergenceError(f"1F1({a}, {b}; {z}) series did not converge in {n_max} terms")
    return total


def kummer_polynomial_exact(a: int, b: float, z: float) -> float:
    """Terminating 1F1 for nonpositive integer a, summed in rational arithmetic."""
    bq, zq = Fraction(b), Fraction(z)
    term = Fraction(1)
    total = Fraction(1)
    for n in range(-int(a)):
        term *= Fraction(a + n) * zq / ((bq + n) * (n + 1))
        total += term
    return float(total)


def kummer1f1(a: float, b: float, z: float) -> float:
    """Kummer's confluent hypergeometric function 1F1(a, b; z) for real arguments.

    Nonpositive integer ``a`` gives the terminating polynomial. For
    ``b in {1/2, 3/2}``, ``z <= 0`` and ``a`` on the half-integer lattice below
    the closed-form seeds, the seeded downward recurrence is used, switching
    to extended precision for deep recurrences. Everything else falls back to
    the power series (via Kummer's transformation when that avoids
    cancellation).
    """
    if _is_nonpositive_int(b):
        raise DomainError(f"1F1 undefined for nonpositive integer b={b}")
    if z == 0:
        return 1.0
    if _is_nonpositive_int(a):
        return kummer_polynomial_exact(int(a), b, z)
    if z < 0 and b in LATTICE_TOP and float(2 * a).is_integer() and a <= LATTICE_TOP[b]:
        depth = int(round(2 * (LATTICE_TOP[b] - a)))
        if depth < 4:
            return float(kummer_closed_form(a, b, -z))
        if depth <= EXTENDED_DEPTH:
            return float(kummer_lattice(b, -z, depth + 1)[-1])
        with mpmath.workdps(EXTENDED_DPS + int(-z / math.log(10))):
            return float(kummer_lattice(b, -z, depth + 1, ctx=mpmath.mp)[-1])
    if z < 0 and b - a > 0:
        # e^z 1F1(b-a, b; -z): positive terms, no cancellation
        return math.exp(z) * kummer_series(b - a, b, -z)
    return kummer_series(a, b, z)
