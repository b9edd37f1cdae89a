import pytest

from ssmeasure import (brute_centered, brute_packing, cantor, estimate_centered, estimate_packing,
                       planar_cantor, sierpinski)
from ssmeasure.errors import TooLarge
from ssmeasure.formulas import closed_form


def test_cantor_quarter_level5_bit_equal():
    a, b = estimate_packing(cantor(0.25), 5), brute_packing(cantor(0.25), 5)
    assert a.same_result(b) and a.value == b.value


def test_sierpinski_third_packing():
    est = brute_packing(sierpinski(1 / 3), 4)
    assert abs(est.value - 4.0) <= est.epsilon


def test_planar_02_packing():
    est = brute_packing(planar_cantor(0.2), 4)
    assert abs(est.value - 5.996245070706) <= est.epsilon
    assert abs(est.value - closed_form("g2", 0.2).value) <= est.epsilon


def test_cantor_third_centered():
    est = brute_centered(cantor(1 / 3), 5)
    assert abs(est.value - 1.199023144561) <= est.epsilon


def test_sierpinski_0278_centered():
    est = brute_centered(sierpinski(0.278), 5)
    assert abs(est.value - 1.561597393347) <= est.epsilon


def test_unequal_ratios(skewed_gasket, flipped_line):
    for system in (skewed_gasket, flipped_line):
        for k in (3, 5):
            assert estimate_centered(system, k).same_result(brute_centered(system, k))
            assert estimate_packing(system, k).same_result(brute_packing(system, k))


def test_cap():
    with pytest.raises(TooLarge):
        brute_packing(sierpinski(0.2), 9)
    with pytest.raises(TooLarge):
        brute_centered(planar_cantor(0.2), 7)
