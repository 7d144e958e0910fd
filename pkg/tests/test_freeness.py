"""
Tests for freeness witnesses and fundamental domains
"""

from fractions import Fraction

import pytest

from cfpoisson.cfspace.cylinders import measure
from cfpoisson.cfspace.freeness import freeness_witness, fundamental_domain, orbit_partition
from cfpoisson.groups.shapes import subgroup_span
from cfpoisson.shared.errors import CFPoissonError


def test_infinite_order_witness(small_scheme, Z):
    """Test the deepest displacing level and its vanishing correlation"""
    witness = freeness_witness(small_scheme, Z.element(1))
    assert witness.case == "infinite-order"
    assert witness.level == 1
    assert witness.shift == 10
    assert witness.correlation == 0


def test_witness_search_bound(small_scheme, Z):
    """Test that a short search falls back to a shallower level"""
    witness = freeness_witness(small_scheme, Z.element(1), l_max=9)
    assert witness.level == 0
    assert witness.shift == 1
    with pytest.raises(CFPoissonError, match="witness_not_found"):
        freeness_witness(small_scheme, Z.element(200), l_max=4)


def test_identity_has_no_witness(small_scheme, Z):
    """Test that the identity is rejected"""
    with pytest.raises(CFPoissonError, match="invalid_precondition"):
        freeness_witness(small_scheme, Z.identity_element)


def test_torsion_witness(torsion_scheme, torsion_group):
    """Test invariant levels and orbits of a torsion element"""
    e1 = torsion_group.basis(1)
    witness = freeness_witness(torsion_scheme, e1)
    assert witness.case == "torsion"
    assert witness.invariant_levels == [1, 2]
    assert witness.level == 1
    assert witness.orbits == [[torsion_group.identity_element, e1]]


def test_orbit_partition(torsion_group):
    """Test orbits of e_2 on the span of e_1 and e_2"""
    g = torsion_group
    orbits = orbit_partition(g.basis(2), subgroup_span(g, 2))
    assert len(orbits) == 2
    assert all(len(o) == 2 for o in orbits)
    with pytest.raises(CFPoissonError, match="invalid_precondition"):
        orbit_partition(g.basis(3), subgroup_span(g, 2))


def test_orbit_partition_needs_torsion(small_scheme, Z):
    """Test that orbits of infinite-order elements are refused"""
    with pytest.raises(CFPoissonError, match="wrong_dichotomy"):
        orbit_partition(Z.element(1), small_scheme.shape(1))


def test_fundamental_domain(torsion_scheme, torsion_group):
    """Test that translates of the domain partition X_n"""
    g = torsion_group
    result = fundamental_domain(torsion_scheme, g.basis(1), 2)
    assert result.order == 2
    assert result.domain.names.elements() == [g.identity_element, g.basis(2)]
    assert measure(result.domain) == Fraction(1, 2)
    assert len(result.translates) == 2
    assert result.translates[0].names.isdisjoint(result.translates[1].names)


def test_fundamental_domain_requires_invariance(torsion_scheme, torsion_group):
    """Test that a non-invariant level is rejected"""
    with pytest.raises(CFPoissonError, match="invalid_precondition"):
        fundamental_domain(torsion_scheme, torsion_group.basis(2), 1)
