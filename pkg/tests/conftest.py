"""
Shared fixtures: small hand-built schemes with known answers
"""

import pytest

from cfpoisson.groups.shapes import interval, subgroup_span
from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.shared.io import store_scheme
from cfpoisson.types.group import GroupDescriptor
from cfpoisson.types.scheme import CFScheme


@pytest.fixture
def Z():
    return GroupDescriptor(kind="integer-lattice", dimension=1)


@pytest.fixture
def Z2():
    return GroupDescriptor(kind="integer-lattice", dimension=2)


@pytest.fixture
def H3():
    return GroupDescriptor(kind="discrete-heisenberg")


@pytest.fixture
def torsion_group():
    """⊕ Z/2"""
    return GroupDescriptor(kind="direct-sum-finite-cyclic", orders=(2,))


def _z_set(group, *values):
    return FiniteSubset.from_elements(group, [group.element(v) for v in values])


@pytest.fixture
def small_scheme(Z):
    """
    F_0 = {0}, C_1 = {0, 3}, F_1 = [-1, 8], C_2 = {0, 30}, F_2 = [-20, 120]
    """
    return CFScheme(
        group=Z,
        F=[_z_set(Z, 0), interval(Z, -1, 8), interval(Z, -20, 120)],
        C=[_z_set(Z, 0, 3), _z_set(Z, 0, 30)],
    )


@pytest.fixture
def torsion_scheme(torsion_group):
    """F_n = <e_1, ..., e_n>, C_n = {0, e_n} over ⊕ Z/2"""
    g = torsion_group
    return CFScheme(
        group=g,
        F=[subgroup_span(g, 0), subgroup_span(g, 1), subgroup_span(g, 2)],
        C=[
            FiniteSubset.from_elements(g, [g.identity_element, g.basis(1)]),
            FiniteSubset.from_elements(g, [g.identity_element, g.basis(2)]),
        ],
    )


@pytest.fixture
def scheme_file(small_scheme, tmp_path):
    path = tmp_path / "scheme.json"
    store_scheme(small_scheme, path)
    return path
