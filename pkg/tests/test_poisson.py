"""
Tests for the Poisson entropy and the entropy bound curve
"""

import math
from fractions import Fraction

import pytest

from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.suspension.poisson import (
    entropy_bound_curve,
    poisson_entropy,
    poisson_entropy_reference,
    poisson_entropy_series,
)
from cfpoisson.types.scheme import CFScheme


def test_entropy_at_zero():
    """Test that the degenerate law has zero entropy"""
    assert poisson_entropy(0) == 0.0
    assert poisson_entropy_series(0) == 0.0
    assert poisson_entropy_reference(0) == 0.0


def test_entropy_at_one():
    """Test the entropy of Poisson(1)"""
    assert poisson_entropy(1.0) == pytest.approx(1.30484, abs=1e-5)


@pytest.mark.parametrize("t", [1e-6, 0.01, 0.5, 1.0, 2.5, 10.0])
def test_entropy_forms_agree(t):
    """Test the direct sum against the series form and the mpmath reference"""
    value = poisson_entropy(t)
    assert value == pytest.approx(poisson_entropy_series(t), abs=1e-12)
    assert value == pytest.approx(poisson_entropy_reference(t), abs=1e-12)


def test_entropy_large_intensity():
    """Test agreement with the Gaussian approximation for large t"""
    t = 1000.0
    value = poisson_entropy(t)
    assert value == pytest.approx(poisson_entropy_reference(t), rel=1e-10)
    assert value == pytest.approx(0.5 * math.log(2 * math.pi * math.e * t), abs=1e-3)


def test_entropy_small_intensity():
    """Test the small-t behaviour f(t) ≈ t(1 - ln t)"""
    t = 1e-8
    assert poisson_entropy(t) == pytest.approx(t * (1 - math.log(t)), rel=1e-6)


def test_entropy_is_increasing():
    """Test monotonicity in t"""
    values = [poisson_entropy(t) for t in (0.001, 0.01, 0.1, 1.0, 10.0)]
    assert values == sorted(values)


@pytest.mark.parametrize("t", [-1.0, float("nan"), float("inf")])
def test_entropy_domain(t):
    """Test that invalid intensities are rejected"""
    with pytest.raises(CFPoissonError, match="domain_error"):
        poisson_entropy(t)


def test_entropy_bound_curve(small_scheme):
    """Test the bound along the levels of a scheme"""
    curve = entropy_bound_curve(small_scheme)
    assert [p.level for p in curve.points] == [1, 2]
    assert [p.measure for p in curve.points] == [Fraction(1, 2), Fraction(1, 4)]
    assert curve.points[0].entropy == pytest.approx(poisson_entropy(0.5))
    assert curve.decreasing


def test_entropy_bound_curve_depth_zero(small_scheme):
    """Test that a depth-0 scheme has no bound to report"""
    s = CFScheme(group=small_scheme.group, F=small_scheme.F[:1], C=[])
    with pytest.raises(CFPoissonError, match="nothing_to_check"):
        entropy_bound_curve(s)
