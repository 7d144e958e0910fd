"""
Tests for run-encoded finite subsets
"""

import numpy as np
import pytest

from cfpoisson.groups.shapes import interval, lattice_box, subgroup_span
from cfpoisson.groups.subsets import (
    FiniteSubset,
    halve,
    product_fiber,
    set_inverse,
    set_product,
    union_all,
)
from cfpoisson.shared.errors import CFPoissonError


def ints(group, *values):
    return FiniteSubset.from_elements(group, [group.element(v) for v in values])


def test_canonical_equality(Z):
    """Test that subsets compare by content, not construction order"""
    assert ints(Z, 3, 1, 2, 2) == interval(Z, 1, 3)
    assert ints(Z, 3, 1, 2).cardinality == 3
    assert interval(Z, 1, 3).run_count == 1


def test_set_algebra(Z):
    """Test union, intersection and difference"""
    a, b = interval(Z, 0, 9), interval(Z, 5, 14)
    assert (a | b) == interval(Z, 0, 14)
    assert (a & b) == interval(Z, 5, 9)
    assert (a - b) == interval(Z, 0, 4)
    assert (a ^ b).cardinality == 10
    assert interval(Z, 2, 3).is_subset(a)
    assert not b.is_subset(a)
    assert a.isdisjoint(interval(Z, 20, 30))


def test_empty_results_on_the_integers(Z):
    """Test set operations whose result is empty on a one-dimensional lattice"""
    a = interval(Z, 0, 4)
    assert not (a - a)
    assert (a - a) == FiniteSubset.empty(Z)
    assert (ints(Z, 1) - ints(Z, 1)).cardinality == 0
    assert not (a & interval(Z, 10, 12))
    assert not (a - interval(Z, -5, 20))
    assert (a - a) | a == a
    assert not FiniteSubset.from_runs(Z, [], [], [])


def test_membership(Z2):
    """Test scalar and vectorized membership"""
    box = lattice_box(Z2, 2)
    assert box.cardinality == 25
    assert Z2.element((2, -2)) in box
    assert Z2.element((3, 0)) not in box
    found = box.contains_points(np.array([[0, 0], [1, 3], [-2, 2]]))
    assert found.tolist() == [True, False, True]


def test_membership_rejects_foreign_elements(Z, Z2):
    """Test that contains refuses elements of another group"""
    with pytest.raises(CFPoissonError, match="kind_mismatch"):
        interval(Z, 0, 3).contains(Z2.element((0, 0)))


def test_set_product_and_inverse(Z):
    """Test Minkowski products and inverses of intervals"""
    assert set_product(interval(Z, 0, 2), interval(Z, 10, 11)) == interval(Z, 10, 13)
    assert set_product(interval(Z, 0, 8), ints(Z, 0, 30)) == (
        interval(Z, 0, 8) | interval(Z, 30, 38)
    )
    assert set_inverse(interval(Z, 1, 3)) == interval(Z, -3, -1)
    assert not set_product(interval(Z, 0, 2), FiniteSubset.empty(Z))


def test_heisenberg_product_is_ordered(H3):
    """Test that Heisenberg set products respect the group law"""
    x = FiniteSubset.singleton(H3.element((1, 0, 0)))
    y = FiniteSubset.singleton(H3.element((0, 1, 0)))
    assert set_product(x, y).elements() == [H3.element((1, 1, 1))]
    assert set_product(y, x).elements() == [H3.element((1, 1, 0))]


def test_product_fiber(H3):
    """Test the single-prefix part of a product"""
    prefixes = [[a, b] for a in (-1, 0, 1) for b in (-1, 0, 1)]
    box = FiniteSubset.from_runs(H3, prefixes, [-1] * 9, [1] * 9)
    full = set_product(box, box)
    lo, hi = full.restrict_prefix((0, 0))
    fiber = product_fiber(box, box, (0, 0))
    assert fiber.cardinality == int(np.sum(hi - lo + 1))
    assert fiber.is_subset(full)


def test_direct_sum_subsets(torsion_group):
    """Test spans and products in the direct sum"""
    g = torsion_group
    span2 = subgroup_span(g, 2)
    assert span2.cardinality == 4
    e1, e2 = g.basis(1), g.basis(2)
    assert span2.translate_left(e1) == span2
    pair = FiniteSubset.from_elements(g, [g.identity_element, e2])
    assert set_product(subgroup_span(g, 1), pair) == span2
    assert set_inverse(span2) == span2


def test_translate(Z):
    """Test left and right translation"""
    assert interval(Z, 0, 4).translate_left(Z.element(-2)) == interval(Z, -2, 2)
    assert interval(Z, 0, 4).translate_right(Z.element(5)) == interval(Z, 5, 9)


def test_union_all(Z):
    """Test merging many subsets at once"""
    parts = [interval(Z, 0, 2), interval(Z, 3, 5), ints(Z, 9)]
    merged = union_all(Z, parts)
    assert merged.cardinality == 7
    assert merged == (interval(Z, 0, 5) | ints(Z, 9))
    assert not union_all(Z, [])


def test_halve(Z):
    """Test square roots of a lattice interval"""
    assert halve(interval(Z, -3, 5)) == interval(Z, -1, 2)


def test_halve_rejects_torsion(torsion_group):
    """Test that halving is refused in the direct sum"""
    with pytest.raises(CFPoissonError, match="kind_mismatch"):
        halve(subgroup_span(torsion_group, 1))


def test_first_and_empty(Z):
    """Test the first element and empty-set errors"""
    assert ints(Z, 7, -4).first().coords == (-4,)
    with pytest.raises(CFPoissonError, match="empty_subset"):
        FiniteSubset.empty(Z).first()


def test_from_runs_direct_sum_range(torsion_group):
    """Test that direct-sum fiber runs must fit the first cyclic order"""
    with pytest.raises(CFPoissonError, match="invalid_element"):
        FiniteSubset.from_runs(torsion_group, [[]], [0], [2])
