import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from robin_born import specfun as sf


def mp_series(a, b, z, dps=80):
    """Direct summation of sum (a)_k / (b)_k z^k / k! at high precision."""
    with mpmath.workdps(dps):
        a, b, z = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(z)
        term, total, k = mpmath.mpf(1), mpmath.mpf(1), 0
        while True:
            term *= (a + k) / (b + k) * z / (k + 1)
            k += 1
            total += term
            if term == 0 or (k > abs(z) + 10 and abs(term) < mpmath.mpf(10) ** (-dps + 5) * abs(total)):
                return float(total)


def rel(a, b):
    return abs(a - b) / abs(b)


# error functions

def test_erf_basics():
    assert sf.erf(0.0) == 0.0
    assert sf.erf(0.7) == -sf.erf(-0.7)


def test_erf_one_against_quadrature():
    with mpmath.workdps(30):
        ref = 2 / mpmath.sqrt(mpmath.pi) * mpmath.quad(lambda t: mpmath.exp(-t * t), [0, 1])
    assert abs(sf.erf(1.0) - float(ref)) < 1e-12


@pytest.mark.parametrize("x", [0.0, 0.1, 0.5, 1.0, 1.5, 2.0])
def test_erf_series_forms_agree(x):
    assert abs(sf.erf_alternating_series(x) - sf.erf_positive_series(x)) < 1e-14


def test_erfc_values():
    assert sf.erfc(0.0) == 1.0
    assert sf.erfc(-1.3) == pytest.approx(2.0 - sf.erfc(1.3), rel=1e-15)
    asym = math.exp(-100.0) / (10.0 * math.sqrt(math.pi))
    assert rel(sf.erfc(10.0), asym) < 0.02


def test_erfcx_values():
    assert sf.erfcx(0.0) == 1.0
    v = sf.erfcx(30.0)
    assert math.isfinite(v) and rel(v, 1.0 / (30.0 * math.sqrt(math.pi))) < 1e-3
    assert rel(sf.erfcx(2.0) * math.exp(-4.0), sf.erfc(2.0)) < 1e-12
    assert math.isfinite(sf.erfcx(1e300))


@given(st.floats(-6.0, 6.0))
def test_erf_plus_erfc(x):
    assert abs(sf.erf(x) + sf.erfc(x) - 1.0) < 1e-14


@given(st.floats(0.0, 26.0))
def test_erfc_against_mpmath(x):
    assert rel(sf.erfc(x), float(mpmath.erfc(x))) < 1e-14


@given(st.floats(-5.0, 1e4))
def test_erfcx_against_mpmath(x):
    with mpmath.workdps(40):
        ref = float(mpmath.exp(mpmath.mpf(x) ** 2) * mpmath.erfc(x))
    assert rel(sf.erfcx(x), ref) < 1e-14


# Beta function and double factorial

def test_beta_values():
    assert sf.beta_fn(0.5, 0.5) == pytest.approx(math.pi, rel=1e-15)
    assert sf.beta_fn(1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert sf.beta_fn(1.5, 0.5) * sf.beta_fn(2.0, 0.5) == pytest.approx(math.pi / 1.5, rel=1e-14)


@pytest.mark.parametrize("a", [0.25 * k for k in range(1, 21)])
def test_beta_pairing(a):
    assert rel(sf.beta_fn(a, 0.5) * sf.beta_fn(a + 0.5, 0.5), math.pi / a) < 1e-13


def test_beta_large_arguments_and_domain():
    assert rel(sf.beta_fn(150.0, 0.5), float(mpmath.beta(150, 0.5))) < 1e-13
    for a, b in [(0.0, 1.0), (1.0, -0.5)]:
        with pytest.raises(sf.DomainError):
            sf.beta_fn(a, b)


def test_double_factorial():
    assert sf.double_factorial(-1) == 1
    assert sf.double_factorial(0) == 1
    assert sf.double_factorial(7) == 105
    assert sf.double_factorial(10) == 3840
    with pytest.raises(sf.DomainError):
        sf.double_factorial(-2)


@pytest.mark.parametrize("n", range(1, 21))
def test_telescoped_beta_product(n):
    # prod_{k<=n} B(k/2, 1/2) = 2^floor(n/2) pi^floor((n+1)/2) / (n-1)!!
    prod = math.prod(sf.beta_fn(k / 2, 0.5) for k in range(1, n + 1))
    rational = Fraction(2 ** (n // 2), sf.double_factorial(n - 1))
    assert rel(prod / math.pi ** ((n + 1) // 2), float(rational)) < 1e-13


# Kummer function

CLOSED = [(0.0, 0.5), (-0.5, 0.5), (-1.0, 0.5), (-1.5, 0.5),
          (0.5, 1.5), (0.0, 1.5), (-0.5, 1.5), (-1.0, 1.5)]


@pytest.mark.parametrize("a, b", CLOSED)
@pytest.mark.parametrize("x", [0.0, 1e-3, 0.4, 1.0, 3.7, 10.0, 18.0, 25.0])
def test_closed_forms_against_series(a, b, x):
    got = sf.kummer_closed_form(a, b, x)
    assert got is not None
    ref = mp_series(a, b, -x)
    assert abs(got - ref) <= 1e-12 * max(abs(ref), 1e-300)


def test_closed_form_examples():
    assert sf.kummer1f1(0.0, 0.5, -7.3) == 1.0
    assert sf.kummer1f1(-1.0, 0.5, -0.4) == pytest.approx(1.8, rel=1e-15)
    z = 1.0
    ref = math.exp(-z) / 2 + math.sqrt(math.pi * z) / 2 * (1 + 1 / (2 * z)) * math.erf(math.sqrt(z))
    assert rel(sf.kummer1f1(-0.5, 1.5, -z), ref) < 1e-12
    assert sf.kummer_closed_form(0.25, 0.5, 1.0) is None


def test_recurrence_step():
    f1 = mp_series(1.0, 0.5, -0.4)
    assert sf.kummer_recurrence(0.0, 0.5, -0.4, 1.0, f1) == pytest.approx(1.8, rel=1e-15)
    # a nontrivial step: F(-1/2) from F(1/2) and F(3/2) at b = 3/2
    got = sf.kummer_recurrence(0.5, 1.5, -2.0, mp_series(0.5, 1.5, -2.0), mp_series(1.5, 1.5, -2.0))
    assert rel(got, mp_series(-0.5, 1.5, -2.0)) < 1e-13
    with pytest.raises(sf.SingularRecurrenceError):
        sf.kummer_recurrence(0.5, 0.5, -1.0, 1.0, 1.0)


@pytest.mark.parametrize("n", [2, 5, 9, 20, 21, 35, 50, 70])
@pytest.mark.parametrize("x", [0.3, 4.0, 16.0, 40.0])
def test_lattice_arguments_against_series(n, x):
    for a, b in [((1 - n) / 2, 0.5), (1 - n / 2, 1.5)]:
        ref = mp_series(a, b, -x, dps=120)
        assert rel(sf.kummer1f1(a, b, -x), ref) < 1e-8


def test_terminating_polynomial_exact():
    assert sf.kummer1f1(-3.0, 0.5, 2.0) == pytest.approx(mp_series(-3.0, 0.5, 2.0), rel=1e-15)


def test_general_arguments_against_mpmath():
    for a, b, z in [(0.3, 1.7, -2.0), (1.25, 0.75, 3.0), (-2.5, 2.5, -12.0), (2.0, 3.0, 0.5)]:
        assert rel(sf.kummer1f1(a, b, z), float(mpmath.hyp1f1(a, b, z))) < 1e-10


def test_kummer_domain():
    assert sf.kummer1f1(0.7, 0.5, 0.0) == 1.0
    for b in (0.0, -2.0):
        with pytest.raises(sf.DomainError):
            sf.kummer1f1(0.5, b, -1.0)
