"""
Canonical shape families: intervals, boxes, subgroup spans, Heisenberg boxes
"""

import numpy as np

from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupDescriptor

# Largest number of runs a shape may have
SHAPE_RUN_LIMIT = 4_000_000


def _grid(bounds: list) -> np.ndarray:
    """All integer points of a product of ranges given as (lo, hi) pairs"""
    if not bounds:
        return np.zeros((1, 0), dtype=np.int64)
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _check_size(runs: int) -> None:
    if runs > SHAPE_RUN_LIMIT:
        raise CFPoissonError("size_limit_exceeded", f"shape would need {runs} runs")


def lattice_box(group: GroupDescriptor, radius: int) -> FiniteSubset:
    """The box [-radius, radius]^d (an interval for Z)"""
    if group.kind != "integer-lattice":
        raise CFPoissonError("kind_mismatch", f"boxes are lattice shapes, not {group.kind}")
    assert group.dimension is not None
    _check_size((2 * radius + 1) ** (group.dimension - 1))
    prefix = _grid([(-radius, radius)] * (group.dimension - 1))
    n = prefix.shape[0]
    return FiniteSubset(group, prefix, np.full(n, -radius), np.full(n, radius))


def interval(group: GroupDescriptor, lo: int, hi: int) -> FiniteSubset:
    """The integer interval [lo, hi] in Z"""
    if group.kind != "integer-lattice" or group.dimension != 1:
        raise CFPoissonError("kind_mismatch", "intervals live in Z")
    return FiniteSubset(group, np.zeros((1, 0), dtype=np.int64), np.array([lo]), np.array([hi]))


def subgroup_span(group: GroupDescriptor, m: int) -> FiniteSubset:
    """The finite subgroup generated by e_1..e_m of the direct sum"""
    if group.kind != "direct-sum-finite-cyclic":
        raise CFPoissonError(
            "kind_mismatch", f"subgroup spans are direct-sum shapes, not {group.kind}"
        )
    if m <= 0:
        return FiniteSubset.from_points(group, np.zeros((1, 0), dtype=np.int64))
    bounds = [(0, group.order(i) - 1) for i in range(2, m + 1)]
    _check_size(int(np.prod([hi + 1 for _, hi in bounds], dtype=object)) if bounds else 1)
    prefix = _grid(bounds)
    n = prefix.shape[0]
    return FiniteSubset(group, prefix, np.zeros(n, dtype=np.int64), np.full(n, group.order(1) - 1))


def heisenberg_box(group: GroupDescriptor, radius: int, height: int) -> FiniteSubset:
    """{(a, b, c) : |a|, |b| <= radius, |c| <= height}"""
    if group.kind != "discrete-heisenberg":
        raise CFPoissonError("kind_mismatch", "Heisenberg boxes need the Heisenberg group")
    _check_size((2 * radius + 1) ** 2)
    prefix = _grid([(-radius, radius)] * 2)
    n = prefix.shape[0]
    return FiniteSubset(group, prefix, np.full(n, -height), np.full(n, height))
