"""
Word norms, norm shells and balls

* integer lattice: l1 norm, the word norm for the unit vectors;
* direct sum: weighted word norm in which e_i has weight i, so
  norm(x) = sum_i i * min(x_i, o_i - x_i) and every shell is finite;
* Heisenberg: word norm for x = (1,0,0), y = (0,1,0) and their inverses,
  computed by breadth-first search up to HEISENBERG_RADIUS_LIMIT.
"""

import logging
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from cfpoisson.groups.arithmetic import column_orders, mul_points, to_points
from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupDescriptor, GroupElement

logger = logging.getLogger(__name__)

HEISENBERG_RADIUS_LIMIT = 24

# Packing of Heisenberg triples within the search limit into one integer key
_A_OFFSET = 64
_C_OFFSET = 1 << 11


def _heisenberg_keys(points: np.ndarray) -> np.ndarray:
    return ((points[:, 0] + _A_OFFSET) * 128 + (points[:, 1] + _A_OFFSET)) * (1 << 12) + (
        points[:, 2] + _C_OFFSET
    )


class _HeisenbergSpheres:
    """Breadth-first spheres of the Heisenberg Cayley graph, grown on demand"""

    def __init__(self) -> None:
        self.spheres: List[np.ndarray] = [np.zeros((1, 3), dtype=np.int64)]
        self.keys = _heisenberg_keys(self.spheres[0])
        self.distances = np.zeros(1, dtype=np.int64)
        self.steps = np.array(
            [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]], dtype=np.int64
        )

    @property
    def radius(self) -> int:
        return len(self.spheres) - 1

    def grow_to(self, radius: int) -> None:
        if radius > HEISENBERG_RADIUS_LIMIT:
            raise CFPoissonError(
                "norm_out_of_range",
                f"Heisenberg word norms are tabulated up to radius {HEISENBERG_RADIUS_LIMIT}",
            )
        while self.radius < radius:
            frontier = self.spheres[-1]
            candidates = np.vstack(
                [mul_points(_HEISENBERG, frontier, step[None, :]) for step in self.steps]
            )
            candidates = np.unique(candidates, axis=0)
            keys = _heisenberg_keys(candidates)
            fresh = ~np.isin(keys, self.keys)
            sphere = candidates[fresh]
            self.spheres.append(sphere)
            all_keys = np.concatenate([self.keys, keys[fresh]])
            all_dist = np.concatenate(
                [self.distances, np.full(int(fresh.sum()), self.radius, dtype=np.int64)]
            )
            order = np.argsort(all_keys)
            self.keys, self.distances = all_keys[order], all_dist[order]
            logger.debug("Heisenberg sphere %d has %d elements", self.radius, sphere.shape[0])

    def lookup(self, points: np.ndarray) -> np.ndarray:
        """Word norms of the given triples, growing the table as needed"""
        if points.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        lower = int((np.abs(points[:, 0]) + np.abs(points[:, 1])).max())
        widest = int(np.abs(points[:, 2]).max())
        if lower > HEISENBERG_RADIUS_LIMIT or widest > HEISENBERG_RADIUS_LIMIT**2:
            raise CFPoissonError(
                "norm_out_of_range",
                f"Heisenberg word norms are tabulated up to radius {HEISENBERG_RADIUS_LIMIT}",
            )
        self.grow_to(max(self.radius, lower))
        while True:
            keys = _heisenberg_keys(points)
            idx = np.clip(np.searchsorted(self.keys, keys), 0, self.keys.shape[0] - 1)
            found = self.keys[idx] == keys
            if found.all():
                return self.distances[idx]
            self.grow_to(self.radius + 1)


_HEISENBERG = GroupDescriptor(kind="discrete-heisenberg")
_SPHERES = _HeisenbergSpheres()


def norm_points(group: GroupDescriptor, points: np.ndarray) -> np.ndarray:
    """Word norms of the rows of a coordinate matrix"""
    points = np.asarray(points, dtype=np.int64)
    if group.kind == "integer-lattice":
        return np.abs(points).sum(axis=1)
    if group.kind == "direct-sum-finite-cyclic":
        if points.shape[1] == 0:
            return np.zeros(points.shape[0], dtype=np.int64)
        orders = column_orders(group, points.shape[1])
        residues = np.mod(points, orders)
        weights = np.arange(1, points.shape[1] + 1, dtype=np.int64)
        return (np.minimum(residues, orders - residues) * weights).sum(axis=1)
    return _SPHERES.lookup(points)


def norm(g: GroupElement) -> int:
    """Word norm of a single element"""
    return int(norm_points(g.group, to_points(g.group, [g]))[0])


@lru_cache(maxsize=64)
def _l1_ball(dim: int, radius: int) -> np.ndarray:
    """All integer points of the dim-dimensional l1 ball of the given radius"""
    if dim == 0:
        return np.zeros((1 if radius >= 0 else 0, 0), dtype=np.int64)
    rows = []
    for x in range(-radius, radius + 1):
        sub = _l1_ball(dim - 1, radius - abs(x))
        rows.append(np.hstack([np.full((sub.shape[0], 1), x, dtype=np.int64), sub]))
    return np.vstack(rows)


@lru_cache(maxsize=128)
def _direct_sum_shell(orders: Tuple[int, ...], radius: int) -> np.ndarray:
    """Residue vectors of weighted norm exactly radius, padded to width radius"""
    group = GroupDescriptor(kind="direct-sum-finite-cyclic", orders=orders)
    results: List[List[int]] = []

    def extend(index: int, remaining: int, prefix: List[int]) -> None:
        if remaining == 0:
            results.append(prefix + [0] * (radius - len(prefix)))
            return
        if index > remaining:
            return
        o = group.order(index)
        extend(index + 1, remaining, prefix + [0])
        for m in range(1, o // 2 + 1):
            if index * m > remaining:
                break
            for x in sorted({m, o - m}):
                extend(index + 1, remaining - index * m, prefix + [x])

    extend(1, radius, [])
    if not results:
        return np.zeros((0, radius), dtype=np.int64)
    return np.array(results, dtype=np.int64).reshape(len(results), radius)


def shell(group: GroupDescriptor, r: int) -> FiniteSubset:
    """
    All elements of word norm exactly r.

    Args:
        group: Ambient group
        r: Radius, r >= 0

    Returns:
        The norm shell; shell(group, 0) is {identity}

    Raises:
        CFPoissonError: domain_error for negative r, norm_out_of_range for
            Heisenberg radii beyond the tabulated range
    """
    if r < 0:
        raise CFPoissonError("domain_error", f"shell radius must be >= 0, got {r}")
    if group.kind == "integer-lattice":
        assert group.dimension is not None
        prefix = _l1_ball(group.dimension - 1, r)
        rest = r - np.abs(prefix).sum(axis=1)
        both = rest > 0
        return FiniteSubset(
            group,
            np.vstack([prefix, prefix[both]]),
            np.concatenate([rest, -rest[both]]),
            np.concatenate([rest, -rest[both]]),
        )
    if group.kind == "direct-sum-finite-cyclic":
        assert group.orders is not None
        return FiniteSubset.from_points(group, _direct_sum_shell(group.orders, r))
    _SPHERES.grow_to(r)
    return FiniteSubset.from_points(group, _SPHERES.spheres[r])


def ball(group: GroupDescriptor, r: int) -> FiniteSubset:
    """All elements of word norm at most r"""
    if r < 0:
        raise CFPoissonError("domain_error", f"ball radius must be >= 0, got {r}")
    if group.kind == "integer-lattice":
        assert group.dimension is not None
        prefix = _l1_ball(group.dimension - 1, r)
        rest = r - np.abs(prefix).sum(axis=1)
        return FiniteSubset(group, prefix, -rest, rest)
    if group.kind == "discrete-heisenberg":
        _SPHERES.grow_to(r)
        return FiniteSubset.from_points(group, np.vstack(_SPHERES.spheres[: r + 1]))
    shells = [shell(group, k) for k in range(r + 1)]
    result = shells[0]
    for s in shells[1:]:
        result = result | s
    return result


def min_norm_element(subset: FiniteSubset) -> GroupElement:
    """
    The first element of a subset in (word norm, lexicographic) order.

    Lattice subsets are scanned run by run (the closest fiber value to 0 in
    each run); other kinds are expanded to points.

    Raises:
        CFPoissonError: empty_subset if the subset is empty
    """
    group = subset.group
    if not subset:
        raise CFPoissonError("empty_subset", "empty subset has no minimal element")
    if group.kind == "integer-lattice":
        fiber = np.clip(0, subset.lo, subset.hi)
        norms = np.abs(subset.prefix).sum(axis=1) + np.abs(fiber)
        best = norms == norms.min()
        candidates = np.hstack([subset.prefix[best], fiber[best][:, None]])
        return _lexicographic_first(group, candidates)
    points = subset.points()
    norms = norm_points(group, points)
    return _lexicographic_first(group, points[norms == norms.min()])


def _lexicographic_first(group: GroupDescriptor, points: np.ndarray) -> GroupElement:
    keys = tuple(points[:, j] for j in reversed(range(points.shape[1])))
    first = points[np.lexsort(keys)[0]] if keys else points[0]
    return group.element(tuple(int(v) for v in first))
