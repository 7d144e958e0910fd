"""
Freeness of the action: witnesses that no g ≠ 1 fixes a set of positive measure
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from cfpoisson.cfspace.action import act, correlation
from cfpoisson.cfspace.cylinders import compact_open, full_level
from cfpoisson.groups.arithmetic import element_order, mul_points, pad_points, power, power_points
from cfpoisson.groups.subsets import FiniteSubset, union_all
from cfpoisson.schemes.checks import check_square, check_triangle
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupElement
from cfpoisson.types.scheme import CFScheme
from cfpoisson.types.space import CompactOpen, FreenessWitness, FundamentalDomain

logger = logging.getLogger(__name__)


def _orbit_table(g: GroupElement, F: FiniteSubset, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orbit data of <g> acting on a g-invariant set.

    Returns:
        (moved, rep) where moved[i, j] is the point g^i·f_j and rep[j] is the
        index of the smallest member of the orbit of f_j
    """
    group = F.group
    points = F.points()
    width = max(points.shape[1], len(g.coords))
    points = pad_points(points, width)
    powers = pad_points(power_points(g, np.arange(order, dtype=np.int64)), width)
    moved = np.stack([mul_points(group, powers[i][None, :], points) for i in range(order)])
    flat = moved.reshape(order * points.shape[0], width)
    _, ids = np.unique(flat, axis=0, return_inverse=True)
    ids = ids.reshape(order, points.shape[0])
    smallest = ids.min(axis=0)
    index_of = np.empty(int(ids.max()) + 1, dtype=np.int64)
    index_of[ids[0]] = np.arange(points.shape[0])
    return moved, index_of[smallest]


def orbit_partition(g: GroupElement, F: FiniteSubset) -> List[List[GroupElement]]:
    """
    The <g>-orbits of a g-invariant finite set, each listed as r, gr, g²r, …
    from its smallest member r.

    Raises:
        CFPoissonError: wrong_dichotomy for infinite-order g, invalid_precondition
            if gF ≠ F
    """
    order = element_order(g)
    if order is None:
        raise CFPoissonError("wrong_dichotomy", f"{g!r} has infinite order")
    if F.translate_left(g) != F:
        raise CFPoissonError("invalid_precondition", f"{g!r}F ≠ F")
    moved, rep = _orbit_table(g, F, order)
    orbits = []
    for r in np.unique(rep):
        members = [moved[0, r]]
        for i in range(1, order):
            if np.array_equal(moved[i, r], moved[0, r]):
                break
            members.append(moved[i, r])
        orbits.append([F.group.element(tuple(int(v) for v in m)) for m in members])
    return orbits


def freeness_witness(
    s: CFScheme, g: GroupElement, l_max: int = 1 << 20, budget: Optional[int] = None
) -> FreenessWitness:
    """
    Evidence that T_g moves almost every point.

    Infinite-order g: the deepest level n with some l such that
    g^l F_nC_{n+1} ⊆ F_{n+1} ∖ F_nC_{n+1}, together with the exact
    correlation μ(T_{g^l}X_n ∩ X_n), which must be 0.

    Torsion g: the levels with gF_n = F_n and the <g>-orbits of the names at
    the smallest such level.

    Raises:
        CFPoissonError: invalid_precondition for g = 1, witness_not_found when
            no level qualifies
    """
    if g.is_identity:
        raise CFPoissonError("invalid_precondition", "the identity fixes every point")
    budget = s.depth if budget is None else budget
    order = element_order(g)

    if order is None:
        for n in reversed(range(s.depth)):
            l = check_triangle(s, g, n, l_max)
            if l is None:
                continue
            X_n = full_level(s, n)
            value = correlation(power(g, l), X_n, X_n, min(s.depth, max(budget, n + 1)))
            logger.info("g=%r: level %d, shift %d, correlation %s", g, n, l, value)
            if value == 0:
                return FreenessWitness(
                    element=g, case="infinite-order", level=n, shift=l, correlation=value
                )
        raise CFPoissonError(
            "witness_not_found", f"no level displaces {g!r} within l <= {l_max}", element=g
        )

    report = check_square(s, g)
    invariant = [v.level for v in report.verdicts if v.passed and v.level is not None]
    if not invariant:
        raise CFPoissonError(
            "witness_not_found", f"no level n >= 1 has {g!r}F_n = F_n", element=g
        )
    level = invariant[0]
    orbits = orbit_partition(g, s.shape(level))
    logger.info(
        "g=%r: invariant levels %s, %d orbits at level %d", g, invariant, len(orbits), level
    )
    return FreenessWitness(
        element=g,
        case="torsion",
        level=level,
        invariant_levels=invariant,
        orbits=orbits,
    )


def fundamental_domain(s: CFScheme, g: GroupElement, n: int) -> FundamentalDomain:
    """
    A set Y ⊆ X_n of orbit representatives with X_n = ⊔_i T_{g^i} Y.

    Raises:
        CFPoissonError: wrong_dichotomy for infinite-order g,
            invalid_precondition if gF_n ≠ F_n, partition_error if the
            translates fail to partition X_n
    """
    order = element_order(g)
    if order is None:
        raise CFPoissonError("wrong_dichotomy", f"{g!r} has infinite order")
    F = s.shape(n)
    if F.translate_left(g) != F:
        raise CFPoissonError("invalid_precondition", f"{g!r}F_{n} ≠ F_{n}", level=n)
    moved, rep = _orbit_table(g, F, order)
    representatives = FiniteSubset.from_points(s.group, moved[0, np.unique(rep)])
    domain = compact_open(s, n, representatives)

    translates: List[CompactOpen] = []
    for i in range(order):
        result = act(power(g, i), domain, n)
        if not result.residual.is_empty:
            raise CFPoissonError("partition_error", f"T_{{g^{i}}}Y leaves level {n}", level=n)
        translates.append(result.image)
    total = sum(t.names.cardinality for t in translates)
    covered = union_all(s.group, [t.names for t in translates])
    if total != covered.cardinality or covered != F:
        raise CFPoissonError(
            "partition_error", f"translates of Y do not partition X_{n}", level=n
        )
    return FundamentalDomain(element=g, order=order, domain=domain, translates=translates)

