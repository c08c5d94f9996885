"""Ball arithmetic: every operation must return an interval that
contains the exact result, at any precision."""

import math
import random
from fractions import Fraction

import pytest

from fibpow.arbreal import (
    CertifiedReal,
    PrecisionExhausted,
    certified_floor,
    certified_less_than,
    certified_sign,
    floor_scaled,
    log_rational,
    nearest_int_distance,
)


def test_from_fraction_contains_value():
    for fr in [Fraction(1, 3), Fraction(-7, 11), Fraction(10**40, 3**30)]:
        x = CertifiedReal.from_fraction(fr)
        assert x.contains(fr)
        assert x.lower <= fr <= x.upper


def test_arithmetic_containment_random():
    random.seed(3)
    for _ in range(300):
        a = Fraction(random.randrange(-10**6, 10**6), random.randrange(1, 10**4))
        b = Fraction(random.randrange(-10**6, 10**6), random.randrange(1, 10**4))
        x, y = CertifiedReal.from_fraction(a), CertifiedReal.from_fraction(b)
        assert (x + y).contains(a + b)
        assert (x - y).contains(a - b)
        assert (x * y).contains(a * b)
        if b != 0:
            assert (x / y).contains(a / b)
        assert abs(x).contains(abs(a))
        assert (-x).contains(-a)


def test_mixed_operand_types():
    x = CertifiedReal.from_fraction(Fraction(5, 3))
    assert (x + 1).contains(Fraction(8, 3))
    assert (2 * x).contains(Fraction(10, 3))
    assert (1 - x).contains(Fraction(-2, 3))
    assert (5 / x).contains(Fraction(3))
    assert (x ** 3).contains(Fraction(125, 27))


def test_log_exp_sqrt_consistency():
    x = CertifiedReal.from_int(7)
    lg = x.log()
    assert abs(float(lg) - math.log(7)) < 1e-12
    assert lg.exp().contains(Fraction(7))
    s = x.sqrt()
    assert s.lower**2 < 7 < s.upper**2


def test_log_rational_accuracy():
    lg = log_rational(10, 1, 256)
    width = lg.upper - lg.lower
    assert width < Fraction(1, 2**200)
    # ln 10 = 2.302585092994045684...
    assert lg.lower < Fraction(2302585092994045685, 10**18)
    assert lg.upper > Fraction(2302585092994045684, 10**18)


def test_precision_refinement():
    x = log_rational(2, 1, 64)
    wide = x.upper - x.lower
    narrow = x.at(1024).upper - x.at(1024).lower
    assert narrow < wide / 2**100


def test_memoized_refinement_shares_cache():
    x = log_rational(3, 1, 128)
    y = x.at(512)
    assert x.eval_at(512) == y.eval_at(512)


def test_log_of_nonpositive_fails():
    with pytest.raises((PrecisionExhausted, ValueError)):
        CertifiedReal.from_int(-2).log().eval_at(64)


def test_certified_floor():
    assert certified_floor(CertifiedReal.from_fraction(Fraction(7, 2))) == 3
    assert certified_floor(CertifiedReal.from_fraction(Fraction(-7, 2))) == -4
    assert certified_floor(log_rational(10, 1)) == 2


def test_floor_scaled():
    lg = log_rational(2, 1, 256)
    C = 10**50
    v = floor_scaled(lg, C)
    exact = Fraction(math.log(2))
    assert abs(v - int(exact * C)) <= 10**41  # float reference is crude
    assert Fraction(v) <= lg.upper * C
    assert Fraction(v + 1) > lg.lower * C


def test_nearest_int_distance():
    x = CertifiedReal.from_fraction(Fraction(41, 10))
    d = nearest_int_distance(x)
    assert d.contains(Fraction(1, 10))
    y = CertifiedReal.from_fraction(Fraction(-25, 10))
    d2 = nearest_int_distance(y)
    assert d2.contains(Fraction(1, 2))


def test_comparisons():
    a = log_rational(2, 1)
    b = log_rational(3, 1)
    assert certified_less_than(a, b)
    assert not certified_less_than(b, a)
    assert certified_sign(a - b) == -1
    assert certified_sign(b - a) == 1
    assert certified_sign(CertifiedReal.exact_zero()) == 0
