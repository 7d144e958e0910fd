"""
Tests for group arithmetic, norms and shells
"""

import numpy as np
import pytest

from cfpoisson.groups.arithmetic import (
    commutator,
    element_order,
    has_finite_order,
    inv,
    is_central,
    mul,
    mul_points,
    order_of,
    power,
    power_points,
)
from cfpoisson.groups.norms import ball, min_norm_element, norm, shell
from cfpoisson.groups.shapes import interval
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupDescriptor


def test_heisenberg_multiplication():
    """Test the Heisenberg product and its non-commutativity"""
    h = GroupDescriptor(kind="discrete-heisenberg")
    x, y = h.element((1, 0, 0)), h.element((0, 1, 0))
    assert mul(x, y).coords == (1, 1, 1)
    assert mul(y, x).coords == (1, 1, 0)
    assert commutator(x, y) == h.central(1)


def test_heisenberg_inverse_and_power():
    """Test inverses and closed-form powers"""
    h = GroupDescriptor(kind="discrete-heisenberg")
    g = h.element((2, 3, 5))
    assert mul(g, inv(g)).is_identity
    assert power(g, 3) == mul(mul(g, g), g)
    assert power(g, -1) == inv(g)


def test_center():
    """Test that only (0, 0, c) is central in the Heisenberg group"""
    h = GroupDescriptor(kind="discrete-heisenberg")
    assert is_central(h.central(7))
    assert not is_central(h.element((1, 0, 0)))
    z2 = GroupDescriptor(kind="integer-lattice", dimension=2)
    assert is_central(z2.element((4, -1)))


def test_direct_sum_canonical_form():
    """Test that direct-sum elements drop trailing zero residues"""
    g = GroupDescriptor(kind="direct-sum-finite-cyclic", orders=(2,))
    assert g.element((1, 0, 2)).coords == (1,)
    assert g.parse([[3, 1]]).coords == (0, 0, 1)
    assert g.element((0, 0)).is_identity


def test_element_order():
    """Test exact orders in each group kind"""
    mixed = GroupDescriptor(kind="direct-sum-finite-cyclic", orders=(2, 3))
    assert element_order(mixed.element((1, 1))) == 6
    assert element_order(mixed.element((0, 2))) == 3
    z = GroupDescriptor(kind="integer-lattice", dimension=1)
    assert element_order(z.element(5)) is None
    assert element_order(z.identity_element) == 1
    assert has_finite_order(mixed.basis(4))
    assert not has_finite_order(z.element(-1))


def test_order_of_bound():
    """Test the bounded order search"""
    g = GroupDescriptor(kind="direct-sum-finite-cyclic", orders=(4,))
    assert order_of(g.element((1,)), 10) == 4
    assert order_of(g.element((1,)), 3) is None
    with pytest.raises(CFPoissonError, match="domain_error"):
        order_of(g.element((1,)), 0)


def test_mixed_groups_rejected():
    """Test that elements of different groups do not multiply"""
    z = GroupDescriptor(kind="integer-lattice", dimension=1)
    z2 = GroupDescriptor(kind="integer-lattice", dimension=2)
    with pytest.raises(CFPoissonError, match="kind_mismatch"):
        mul(z.element(1), z2.element((0, 1)))


def test_norms():
    """Test word norms for the lattice, direct sum and Heisenberg group"""
    z2 = GroupDescriptor(kind="integer-lattice", dimension=2)
    assert norm(z2.element((3, -4))) == 7
    ds = GroupDescriptor(kind="direct-sum-finite-cyclic", orders=(2,))
    assert norm(ds.basis(3)) == 3
    h = GroupDescriptor(kind="discrete-heisenberg")
    assert norm(h.element((1, 0, 0))) == 1
    assert norm(h.central(1)) == 4


def test_shells_and_balls():
    """Test shell and ball sizes"""
    z = GroupDescriptor(kind="integer-lattice", dimension=1)
    assert shell(z, 0).elements() == [z.identity_element]
    assert [g.coords for g in shell(z, 3).elements()] == [(-3,), (3,)]
    z2 = GroupDescriptor(kind="integer-lattice", dimension=2)
    assert ball(z2, 2).cardinality == 13
    assert shell(z2, 2).cardinality == 8
    h = GroupDescriptor(kind="discrete-heisenberg")
    assert shell(h, 1).cardinality == 4


def test_negative_radius():
    """Test that negative radii are rejected"""
    z = GroupDescriptor(kind="integer-lattice", dimension=1)
    with pytest.raises(CFPoissonError, match="domain_error"):
        shell(z, -1)


def test_min_norm_element():
    """Test the first element in norm-then-lexicographic order"""
    z = GroupDescriptor(kind="integer-lattice", dimension=1)
    assert min_norm_element(interval(z, 4, 9)).coords == (4,)
    assert min_norm_element(interval(z, -2, 2)).coords == (0,)
    both = interval(z, -5, -3) | interval(z, 3, 6)
    assert min_norm_element(both).coords == (-3,)


def test_power_points_match_closed_form(H3):
    """Test vectorized Heisenberg powers against the single-element closed form"""
    g = H3.element((3, 5, 1))
    exponents = np.array([0, 1, 2, -7, 1 << 20, -(1 << 20)])
    rows = power_points(g, exponents)
    assert [tuple(int(v) for v in row) for row in rows] == [
        power(g, int(k)).coords for k in exponents
    ]


def test_point_arithmetic_refuses_to_wrap(Z, H3):
    """Test that coordinates beyond 64-bit range raise instead of wrapping"""
    with pytest.raises(CFPoissonError, match="size_limit_exceeded"):
        power_points(H3.element((3, 5, 1)), np.array([1 << 31]))
    with pytest.raises(CFPoissonError, match="size_limit_exceeded"):
        mul_points(Z, np.array([[1 << 61]]), np.array([[1 << 61]]))
    with pytest.raises(CFPoissonError, match="size_limit_exceeded"):
        mul_points(H3, np.array([[1 << 32, 0, 0]]), np.array([[0, 1 << 31, 0]]))
    assert mul_points(Z, np.array([[1 << 60]]), np.array([[1]]))[0, 0] == (1 << 60) + 1
