"""
Finite subsets of supported groups stored as sorted runs

A subset is a table of runs (prefix..., lo, hi): all elements whose prefix
coordinates equal the row prefix and whose fiber coordinate lies in
[lo, hi]. The fiber is the last coordinate for the lattice and Heisenberg
groups (c is central, so left and right multiplication shift whole runs) and
the first coordinate for the direct sum, where runs stay inside
[0, order(1) - 1]. Rows are kept sorted and merged, which makes the table a
canonical form: two subsets are equal iff their tables are equal.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from cfpoisson.groups.arithmetic import column_orders, from_points, pad_points, to_points
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupDescriptor, GroupElement

logger = logging.getLogger(__name__)

# Run pairs materialized at once by set_product
PAIR_CHUNK = 1 << 21

# Largest subset expanded to explicit elements
EXPAND_LIMIT = 50_000_000

_KEY_LIMIT = 1 << 62

Runs = Tuple[np.ndarray, np.ndarray, np.ndarray]


def _fixed_width(group: GroupDescriptor) -> Optional[int]:
    if group.kind == "integer-lattice":
        assert group.dimension is not None
        return group.dimension - 1
    if group.kind == "discrete-heisenberg":
        return 2
    return None


def _empty_runs(group: GroupDescriptor) -> Runs:
    width = _fixed_width(group) or 0
    empty = np.zeros(0, dtype=np.int64)
    return np.zeros((0, width), dtype=np.int64), empty, empty.copy()


def _prefix_orders(group: GroupDescriptor, width: int) -> np.ndarray:
    return column_orders(group, width, start=2)


def _wrap(prefix: np.ndarray, lo: np.ndarray, hi: np.ndarray, modulus: int) -> Runs:
    """Reduce fiber intervals mod the first direct-sum order, splitting wrapped runs"""
    length = hi - lo + 1
    full = length >= modulus
    start = np.mod(lo, modulus)
    end = start + length - 1
    lo1 = np.where(full, 0, start)
    hi1 = np.where(full, modulus - 1, np.minimum(end, modulus - 1))
    extra = ~full & (end > modulus - 1)
    if not extra.any():
        return prefix, lo1, hi1
    lo2 = np.zeros(int(extra.sum()), dtype=np.int64)
    hi2 = (end - modulus)[extra]
    return (
        np.vstack([prefix, prefix[extra]]),
        np.concatenate([lo1, lo2]),
        np.concatenate([hi1, hi2]),
    )


def _canonicalize(
    group: GroupDescriptor, prefix: np.ndarray, lo: np.ndarray, hi: np.ndarray
) -> Runs:
    """Sort runs by (prefix, lo) and merge overlapping or adjacent runs"""
    lo = np.asarray(lo, dtype=np.int64).reshape(-1)
    hi = np.asarray(hi, dtype=np.int64).reshape(-1)
    if lo.shape[0] == 0:
        return _empty_runs(group)
    prefix = np.asarray(prefix, dtype=np.int64).reshape(lo.shape[0], -1)
    keep = lo <= hi
    if not keep.all():
        prefix, lo, hi = prefix[keep], lo[keep], hi[keep]
    if lo.shape[0] == 0:
        return _empty_runs(group)

    width = prefix.shape[1]
    if _fixed_width(group) is None:
        while width > 0 and not prefix[:, width - 1].any():
            width -= 1
        prefix = prefix[:, :width]

    keys = (lo,) + tuple(prefix[:, j] for j in reversed(range(width)))
    order = np.lexsort(keys)
    prefix, lo, hi = prefix[order], lo[order], hi[order]

    n = lo.shape[0]
    new_group = np.ones(n, dtype=bool)
    if width:
        new_group[1:] = np.any(prefix[1:] != prefix[:-1], axis=1)
    else:
        new_group[1:] = False
    gid = np.cumsum(new_group) - 1
    base = int(lo.min())
    span = int(hi.max()) - base + 2
    if (int(gid[-1]) + 1) * span >= _KEY_LIMIT:
        raise CFPoissonError("size_limit_exceeded", "run table too wide for 64-bit keys")
    key = gid * span + (hi - base)
    running = np.maximum.accumulate(key)
    start = new_group.copy()
    if n > 1:
        previous_hi = running[:-1] - gid[1:] * span + base
        start[1:] |= lo[1:] > previous_hi + 1
    idx = np.flatnonzero(start)
    return prefix[idx], lo[idx], np.maximum.reduceat(hi, idx)


def _joint_ids(*prefixes: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    """Common lexicographic ids for the rows of several prefix tables"""
    lengths = [p.shape[0] for p in prefixes]
    stacked = np.vstack(prefixes)
    if stacked.shape[1] == 0 or stacked.shape[0] == 0:
        ids = np.zeros(stacked.shape[0], dtype=np.int64)
        table = np.zeros((1, stacked.shape[1]), dtype=np.int64)
    else:
        table, ids = np.unique(stacked, axis=0, return_inverse=True)
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
    pieces = np.split(ids, np.cumsum(lengths)[:-1])
    return pieces, table


class FiniteSubset:
    """
    A finite subset of a group, stored as canonical runs.

    Instances are immutable; every operation returns a new subset.
    """

    __slots__ = ("group", "prefix", "lo", "hi", "_cardinality")

    def __init__(
        self,
        group: GroupDescriptor,
        prefix: np.ndarray,
        lo: np.ndarray,
        hi: np.ndarray,
        canonical: bool = False,
    ):
        if not canonical:
            prefix, lo, hi = _canonicalize(group, prefix, lo, hi)
        for array in (prefix, lo, hi):
            array.flags.writeable = False
        self.group = group
        self.prefix = prefix
        self.lo = lo
        self.hi = hi
        self._cardinality: Optional[int] = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def empty(cls, group: GroupDescriptor) -> "FiniteSubset":
        prefix, lo, hi = _empty_runs(group)
        return cls(group, prefix, lo, hi, canonical=True)

    @classmethod
    def from_points(cls, group: GroupDescriptor, points: np.ndarray) -> "FiniteSubset":
        """Subset from a coordinate matrix (duplicates collapse)"""
        points = np.asarray(points, dtype=np.int64)
        if points.ndim != 2:
            raise CFPoissonError("invalid_element", "coordinate matrix must be two-dimensional")
        prefix, fiber = split_points(group, points)
        return cls(group, prefix, fiber, fiber.copy())

    @classmethod
    def from_elements(
        cls, group: GroupDescriptor, elements: Iterable[GroupElement]
    ) -> "FiniteSubset":
        elements = list(elements)
        if not elements:
            return cls.empty(group)
        return cls.from_points(group, to_points(group, elements))

    @classmethod
    def from_runs(
        cls,
        group: GroupDescriptor,
        prefix: Sequence[Sequence[int]],
        lo: Sequence[int],
        hi: Sequence[int],
    ) -> "FiniteSubset":
        lo_arr = np.asarray(lo, dtype=np.int64).reshape(-1)
        if lo_arr.size == 0:
            return cls.empty(group)
        prefix_arr = np.asarray(prefix, dtype=np.int64).reshape(lo_arr.shape[0], -1)
        hi_arr = np.asarray(hi, dtype=np.int64).reshape(-1)
        if group.kind == "direct-sum-finite-cyclic":
            modulus = group.order(1)
            if lo_arr.size and (lo_arr.min() < 0 or hi_arr.max() >= modulus):
                raise CFPoissonError(
                    "invalid_element", "direct-sum fiber runs must lie in [0, order)"
                )
            prefix_arr = np.mod(prefix_arr, _prefix_orders(group, prefix_arr.shape[1]))
        return cls(group, prefix_arr, lo_arr, hi_arr)

    @classmethod
    def singleton(cls, g: GroupElement) -> "FiniteSubset":
        return cls.from_elements(g.group, [g])

    # -- basic queries --------------------------------------------------------

    @property
    def width(self) -> int:
        return self.prefix.shape[1]

    @property
    def run_count(self) -> int:
        return int(self.lo.shape[0])

    @property
    def cardinality(self) -> int:
        if self._cardinality is None:
            self._cardinality = int(np.sum(self.hi - self.lo + 1, dtype=np.int64))
        return self._cardinality

    def __len__(self) -> int:
        return self.cardinality

    def __bool__(self) -> bool:
        return self.run_count > 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSubset):
            return NotImplemented
        return (
            self.group == other.group
            and self.prefix.shape == other.prefix.shape
            and np.array_equal(self.prefix, other.prefix)
            and np.array_equal(self.lo, other.lo)
            and np.array_equal(self.hi, other.hi)
        )

    def __hash__(self) -> int:
        return hash((self.group, self.prefix.tobytes(), self.lo.tobytes(), self.hi.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteSubset({self.group.label}, #={self.cardinality}, runs={self.run_count})"

    def points(self) -> np.ndarray:
        """Coordinate matrix of all elements, in canonical order"""
        total = self.cardinality
        if total > EXPAND_LIMIT:
            raise CFPoissonError(
                "size_limit_exceeded", f"refusing to expand {total} elements into points"
            )
        lengths = self.hi - self.lo + 1
        rows = np.repeat(np.arange(self.run_count), lengths)
        starts = np.cumsum(lengths) - lengths
        offsets = np.arange(total, dtype=np.int64) - np.repeat(starts, lengths)
        fiber = self.lo[rows] + offsets
        return join_points(self.group, self.prefix[rows], fiber)

    def elements(self) -> List[GroupElement]:
        return from_points(self.group, self.points())

    def first(self) -> GroupElement:
        """Smallest element in canonical run order"""
        if not self:
            raise CFPoissonError("empty_subset", "empty subset has no elements")
        point = join_points(self.group, self.prefix[:1], self.lo[:1])
        return from_points(self.group, point)[0]

    def contains_points(self, points: np.ndarray) -> np.ndarray:
        """Vectorized membership test for the rows of a coordinate matrix"""
        points = np.asarray(points, dtype=np.int64)
        result = np.zeros(points.shape[0], dtype=bool)
        if not self or points.shape[0] == 0:
            return result
        prefix, fiber = split_points(self.group, points)
        own = self.prefix
        if prefix.shape[1] != own.shape[1]:
            width = max(prefix.shape[1], own.shape[1])
            prefix, own = pad_points(prefix, width), pad_points(own, width)
        (run_ids, point_ids), _ = _joint_ids(own, prefix)
        base = min(int(self.lo.min()), int(fiber.min()))
        span = max(int(self.hi.max()), int(fiber.max())) - base + 2
        run_keys = run_ids * span + (self.lo - base)
        point_keys = point_ids * span + (fiber - base)
        idx = np.searchsorted(run_keys, point_keys, side="right") - 1
        found = idx >= 0
        idx = np.clip(idx, 0, None)
        return found & (run_ids[idx] == point_ids) & (fiber <= self.hi[idx])

    def contains(self, g: GroupElement) -> bool:
        if g.group != self.group:
            raise CFPoissonError("kind_mismatch", f"{g!r} is not an element of {self.group.label}")
        return bool(self.contains_points(to_points(self.group, [g]))[0])

    def __contains__(self, g: object) -> bool:
        return isinstance(g, GroupElement) and self.contains(g)

    # -- set algebra ----------------------------------------------------------

    def _check(self, other: "FiniteSubset") -> None:
        if self.group != other.group:
            raise CFPoissonError(
                "kind_mismatch", f"subsets of {self.group.label} and {other.group.label}"
            )

    def _combine(self, other: "FiniteSubset", keep: str) -> "FiniteSubset":
        self._check(other)
        if not self and not other:
            return self
        a_prefix, b_prefix = self.prefix, other.prefix
        if a_prefix.shape[1] != b_prefix.shape[1]:
            width = max(a_prefix.shape[1], b_prefix.shape[1])
            a_prefix, b_prefix = pad_points(a_prefix, width), pad_points(b_prefix, width)
        (a_ids, b_ids), table = _joint_ids(a_prefix, b_prefix)
        lows = np.concatenate([self.lo, other.lo])
        highs = np.concatenate([self.hi, other.hi])
        base = int(lows.min())
        span = int(highs.max()) - base + 3
        if table.shape[0] * span >= _KEY_LIMIT:
            raise CFPoissonError("size_limit_exceeded", "run table too wide for 64-bit keys")
        starts = np.concatenate([a_ids * span + self.lo - base, b_ids * span + other.lo - base])
        ends = np.concatenate(
            [a_ids * span + self.hi + 1 - base, b_ids * span + other.hi + 1 - base]
        )
        weights = np.concatenate(
            [np.ones(self.run_count, dtype=np.int64), np.full(other.run_count, 2, dtype=np.int64)]
        )
        keys, inverse = np.unique(np.concatenate([starts, ends]), return_inverse=True)
        delta = np.bincount(
            inverse.reshape(-1),
            weights=np.concatenate([weights, -weights]),
            minlength=keys.shape[0],
        ).astype(np.int64)
        value = np.cumsum(delta)[:-1]
        if keep == "union":
            selected = value > 0
        elif keep == "intersection":
            selected = value == 3
        elif keep == "difference":
            selected = value == 1
        else:
            selected = (value == 1) | (value == 2)
        seg_start = keys[:-1][selected]
        seg_end = keys[1:][selected] - 1
        ids = seg_start // span
        return FiniteSubset(
            self.group, table[ids], seg_start - ids * span + base, seg_end - ids * span + base
        )

    def union(self, other: "FiniteSubset") -> "FiniteSubset":
        return self._combine(other, "union")

    def intersection(self, other: "FiniteSubset") -> "FiniteSubset":
        return self._combine(other, "intersection")

    def difference(self, other: "FiniteSubset") -> "FiniteSubset":
        return self._combine(other, "difference")

    def symmetric_difference(self, other: "FiniteSubset") -> "FiniteSubset":
        return self._combine(other, "symmetric")

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __xor__ = symmetric_difference

    def is_subset(self, other: "FiniteSubset") -> bool:
        return not self.difference(other)

    def __le__(self, other: "FiniteSubset") -> bool:
        return self.is_subset(other)

    def __lt__(self, other: "FiniteSubset") -> bool:
        return self.is_subset(other) and self.cardinality < other.cardinality

    def isdisjoint(self, other: "FiniteSubset") -> bool:
        return not self.intersection(other)

    def restrict_prefix(self, prefix: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        """Fiber intervals (lo, hi) of the runs whose prefix equals the given one"""
        target = np.asarray(prefix, dtype=np.int64).reshape(1, -1)
        own = self.prefix
        if own.shape[1] != target.shape[1]:
            width = max(own.shape[1], target.shape[1])
            own, target = pad_points(own, width), pad_points(target, width)
        mask = np.all(own == target, axis=1) if own.shape[1] else np.ones(self.run_count, bool)
        return self.lo[mask], self.hi[mask]

    # -- group operations -------------------------------------------------------

    def translate_left(self, g: GroupElement) -> "FiniteSubset":
        """{g·a : a in self}"""
        return set_product(FiniteSubset.singleton(g), self)

    def translate_right(self, g: GroupElement) -> "FiniteSubset":
        """{a·g : a in self}"""
        return set_product(self, FiniteSubset.singleton(g))


# -- point/run conversion ---------------------------------------------------------


def split_points(group: GroupDescriptor, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Split a coordinate matrix into (prefix table, fiber column)"""
    points = np.asarray(points, dtype=np.int64)
    if group.kind == "integer-lattice":
        return points[:, :-1], points[:, -1].copy()
    if group.kind == "discrete-heisenberg":
        return points[:, :2], points[:, 2].copy()
    if points.shape[1] == 0:
        return np.zeros((points.shape[0], 0), dtype=np.int64), np.zeros(points.shape[0], np.int64)
    points = np.mod(points, column_orders(group, points.shape[1]))
    return points[:, 1:], points[:, 0].copy()


def join_points(group: GroupDescriptor, prefix: np.ndarray, fiber: np.ndarray) -> np.ndarray:
    fiber = np.asarray(fiber, dtype=np.int64).reshape(-1, 1)
    if group.kind == "direct-sum-finite-cyclic":
        return np.hstack([fiber, prefix])
    return np.hstack([prefix, fiber])


# -- run kernels ------------------------------------------------------------------


def _multiply_runs(
    group: GroupDescriptor,
    pa: np.ndarray,
    la: np.ndarray,
    ha: np.ndarray,
    pb: np.ndarray,
    lb: np.ndarray,
    hb: np.ndarray,
) -> Runs:
    """Products of run pairs: each pair multiplies to a single run (or two, after wrapping)"""
    if group.kind == "integer-lattice":
        return pa + pb, la + lb, ha + hb
    if group.kind == "discrete-heisenberg":
        offset = pa[:, 0] * pb[:, 1]
        return pa + pb, la + lb + offset, ha + hb + offset
    width = max(pa.shape[1], pb.shape[1])
    prefix = np.mod(pad_points(pa, width) + pad_points(pb, width), _prefix_orders(group, width))
    return _wrap(prefix, la + lb, ha + hb, group.order(1))


def _invert_runs(
    group: GroupDescriptor, prefix: np.ndarray, lo: np.ndarray, hi: np.ndarray
) -> Runs:
    if group.kind == "integer-lattice":
        return -prefix, -hi, -lo
    if group.kind == "discrete-heisenberg":
        ab = prefix[:, 0] * prefix[:, 1]
        return -prefix, ab - hi, ab - lo
    flipped = np.mod(-prefix, _prefix_orders(group, prefix.shape[1]))
    return _wrap(flipped, -hi, -lo, group.order(1))


def set_product(a: FiniteSubset, b: FiniteSubset) -> FiniteSubset:
    """
    The product set {x·y : x in A, y in B}.

    Run pairs are multiplied in chunks of at most PAIR_CHUNK pairs and merged.

    Raises:
        CFPoissonError: kind_mismatch if A and B live in different groups
    """
    a._check(b)
    group = a.group
    if not a or not b:
        return FiniteSubset.empty(group)
    na, nb = a.run_count, b.run_count
    step = max(1, PAIR_CHUNK // nb)
    parts: List[Runs] = []
    pending = 0
    for start in range(0, na, step):
        stop = min(na, start + step)
        ia = np.repeat(np.arange(start, stop), nb)
        ib = np.tile(np.arange(nb), stop - start)
        runs = _multiply_runs(
            group, a.prefix[ia], a.lo[ia], a.hi[ia], b.prefix[ib], b.lo[ib], b.hi[ib]
        )
        parts.append(_canonicalize(group, *runs))
        pending += parts[-1][1].shape[0]
        if len(parts) > 1 and pending > 4 * PAIR_CHUNK:
            parts = [_merge_parts(group, parts)]
            pending = parts[0][1].shape[0]
    if na * nb > PAIR_CHUNK:
        logger.debug("set_product %s x %s run pairs on %s", na, nb, group.label)
    prefix, lo, hi = _merge_parts(group, parts)
    return FiniteSubset(group, prefix, lo, hi, canonical=True)


def _merge_parts(group: GroupDescriptor, parts: List[Runs]) -> Runs:
    if len(parts) == 1:
        return parts[0]
    width = max(p[0].shape[1] for p in parts)
    prefix = np.vstack([pad_points(p[0], width) for p in parts])
    lo = np.concatenate([p[1] for p in parts])
    hi = np.concatenate([p[2] for p in parts])
    return _canonicalize(group, prefix, lo, hi)


def set_inverse(a: FiniteSubset) -> FiniteSubset:
    """The inverse set {x^-1 : x in A}"""
    if not a:
        return a
    return FiniteSubset(a.group, *_invert_runs(a.group, a.prefix, a.lo, a.hi))


def product_fiber(a: FiniteSubset, b: FiniteSubset, target: Sequence[int]) -> FiniteSubset:
    """
    The part of A·B whose prefix equals target, computed from matching run pairs only.

    Prefixes multiply additively in every supported kind (mod the orders for
    the direct sum), so only pairs with prefix(x) + prefix(y) = target contribute.
    """
    a._check(b)
    group = a.group
    if not a or not b:
        return FiniteSubset.empty(group)
    width = max(a.width, b.width, len(target))
    target_row = pad_points(np.asarray(target, dtype=np.int64).reshape(1, -1), width)
    pa, pb = pad_points(a.prefix, width), pad_points(b.prefix, width)
    needed = target_row - pa
    if group.kind == "direct-sum-finite-cyclic":
        needed = np.mod(needed, _prefix_orders(group, width))
    (need_ids, b_ids), _ = _joint_ids(needed, pb)
    order = np.argsort(b_ids, kind="stable")
    sorted_ids = b_ids[order]
    left = np.searchsorted(sorted_ids, need_ids, side="left")
    right = np.searchsorted(sorted_ids, need_ids, side="right")
    counts = right - left
    if counts.sum() == 0:
        return FiniteSubset.empty(group)
    ia = np.repeat(np.arange(a.run_count), counts)
    offsets = np.arange(int(counts.sum())) - np.repeat(np.cumsum(counts) - counts, counts)
    ib = order[np.repeat(left, counts) + offsets]
    runs = _multiply_runs(group, pa[ia], a.lo[ia], a.hi[ia], pb[ib], b.lo[ib], b.hi[ib])
    return FiniteSubset(group, *runs)


def union_all(group: GroupDescriptor, subsets: Iterable[FiniteSubset]) -> FiniteSubset:
    """Union of many subsets in one merge pass"""
    parts = [(s.prefix, s.lo, s.hi) for s in subsets if s]
    if not parts:
        return FiniteSubset.empty(group)
    return FiniteSubset(group, *_merge_parts(group, parts + [_empty_runs(group)]))


def halve(a: FiniteSubset) -> FiniteSubset:
    """
    The set {x : x·x ∈ A} for the lattice and Heisenberg groups.

    x = (a, b, c) squares to (2a, 2b, 2c + ab), so only runs with an even
    prefix contribute and their fiber interval is halved.

    Raises:
        CFPoissonError: kind_mismatch for the direct sum, where square roots
            are not unique
    """
    group = a.group
    if group.kind == "direct-sum-finite-cyclic":
        raise CFPoissonError("kind_mismatch", "square roots are not unique in a torsion group")
    if not a:
        return a
    even = np.all(a.prefix % 2 == 0, axis=1) if a.width else np.ones(a.run_count, dtype=bool)
    prefix = a.prefix[even] // 2
    lo, hi = a.lo[even], a.hi[even]
    if group.kind == "discrete-heisenberg":
        ab = prefix[:, 0] * prefix[:, 1]
        lo, hi = lo - ab, hi - ab
    return FiniteSubset(group, prefix, -((-lo) // 2), hi // 2)
