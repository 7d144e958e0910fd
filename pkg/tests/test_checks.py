"""
Tests for the scheme condition checks
"""

from fractions import Fraction

import pytest

from cfpoisson.groups.shapes import interval
from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.schemes.checks import (
    check_base,
    check_exhaustion,
    check_folner,
    check_mixing,
    check_square,
    check_triangle,
    growth_sequence,
    triangle_report,
)
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.scheme import CFScheme


def ints(group, *values):
    return FiniteSubset.from_elements(group, [group.element(v) for v in values])


def test_base_conditions_hold(small_scheme):
    """Test that the hand-built scheme satisfies every base condition"""
    report = check_base(small_scheme)
    assert report.passed
    assert report.level_map() == {0: True, 1: True, 2: True}


def test_growth_sequence(small_scheme):
    """Test the exact growth ratios"""
    assert growth_sequence(small_scheme) == [Fraction(1), Fraction(5), Fraction(141, 4)]


def test_triple_product_not_proper(Z):
    """Test that F_1 = F_0^-1 F_0 F_0 C_1 fails proper inclusion and growth"""
    s = CFScheme(group=Z, F=[ints(Z, 0), ints(Z, 0, 3)], C=[ints(Z, 0, 3)])
    report = check_base(s)
    assert not report.passed
    assert report.find("triple_product", 0).reason == "triple_product_not_proper"
    assert report.find("growth").reason == "growth_not_increasing"


def test_base_depth_zero(Z):
    """Test that a depth-0 scheme has nothing to check"""
    s = CFScheme(group=Z, F=[ints(Z, 0)], C=[])
    with pytest.raises(CFPoissonError, match="nothing_to_check"):
        check_base(s)


def test_folner(small_scheme):
    """Test Følner certification with per-level tolerances"""
    assert check_folner(small_scheme, None, [Fraction(1, 3), Fraction(1, 4)]).passed
    strict = check_folner(small_scheme, None, Fraction(1, 100))
    verdict = strict.find("folner", 1)
    assert not verdict.passed
    assert verdict.reason == "folner_defect_too_large"
    assert verdict.measurements["defect"] == "1/5"


def test_folner_default_schedule(small_scheme):
    """Test that the default tolerance at level n is 1/(n+2)"""
    report = check_folner(small_scheme)
    assert report.parameters["epsilons"] == ["1/3", "1/4"]
    assert report.passed
    assert report.find("folner", 1).measurements["defect"] == "1/5"


def test_folner_rejects_nonpositive_tolerance(small_scheme):
    """Test that a zero tolerance is a domain error"""
    with pytest.raises(CFPoissonError, match="domain_error"):
        check_folner(small_scheme, None, Fraction(0))


def test_mixing_fails_on_constant_copy_counts(small_scheme):
    """Test that equal copy counts break the mixing conditions"""
    report = check_mixing(small_scheme)
    assert not report.passed
    assert report.find("copy_counts_increasing").reason == "copy_counts_not_increasing"
    assert report.find("mixing_product", 1).passed
    assert report.find("mixing_disjoint", 1).passed


def test_mixing_sets_overlap(Z):
    """Test the overlap witness when a copy shift is too short"""
    s = CFScheme(
        group=Z,
        F=[ints(Z, 0), interval(Z, -1, 8), interval(Z, -20, 120)],
        C=[ints(Z, 0, 3), ints(Z, 0, 15)],
    )
    verdict = check_mixing(s).find("mixing_disjoint", 1)
    assert not verdict.passed
    assert verdict.reason == "mixing_sets_not_disjoint"
    assert verdict.witness[0].coords == (6,)


def test_triangle(small_scheme, Z):
    """Test the smallest displacing power at each level"""
    assert check_triangle(small_scheme, Z.element(1), 0, 100) == 1
    assert check_triangle(small_scheme, Z.element(1), 1, 100) == 10
    assert check_triangle(small_scheme, Z.element(1), 1, 9) is None
    report = triangle_report(small_scheme, Z.element(1), 100)
    assert report.passed


def test_square_needs_torsion(small_scheme, Z):
    """Test that the square condition refuses infinite-order elements"""
    with pytest.raises(CFPoissonError, match="wrong_dichotomy"):
        check_square(small_scheme, Z.element(2))


def test_square_on_torsion_scheme(torsion_scheme, torsion_group):
    """Test gF_n = F_n in the direct sum"""
    report = check_square(torsion_scheme, torsion_group.basis(1))
    assert report.passed
    assert report.level_map() == {1: True, 2: True}
    e2 = check_square(torsion_scheme, torsion_group.basis(2))
    assert e2.level_map() == {1: False, 2: True}
    assert e2.passed


def test_exhaustion(small_scheme):
    """Test norm-ball coverage by the shapes"""
    assert check_exhaustion(small_scheme, 1).passed
    report = check_exhaustion(small_scheme, 30)
    assert not report.passed
    assert report.verdicts[0].reason == "exhaustion_incomplete"
